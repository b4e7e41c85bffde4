#pragma once

// Parsers and writers for the flat-file formats:
//   - scenario files   ("# curveform scenario v1", INI-style sections)
//   - curve files      ("# curveform curve v1", coefficient vectors)
//   - topology files   ("# curveform topology v1", edge lists)
// All formats are line based; '#' starts a comment except in the mandatory
// version header, which is the first non-blank line.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "curveform/csv.hpp"
#include "curveform/errors.hpp"
#include "curveform/scenario.hpp"

namespace curveform {

namespace detail {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<KeyValue> entries;
};

/// Parse the generic "# <tool> <kind> v<N>" header plus [section] key=value
/// body shared by all formats.
struct Document {
  std::string kind;
  int version = 0;
  std::vector<Section> sections;
};

inline Document read_document(const std::string& path,
                              const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open file: " + path);
  }
  Document doc;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  // Key-value pairs before any [section] land in an unnamed section.
  doc.sections.push_back({"", 0, {}});
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    if (!header_seen) {
      std::istringstream hs(text);
      std::string hash, tool, kind, version;
      hs >> hash >> tool >> kind >> version;
      if (hash != "#" || tool != "curveform" || kind != expected_kind ||
          version.size() < 2 || version[0] != 'v') {
        throw ParseError("expected header '# curveform " + expected_kind +
                             " v1' in " + path,
                         line_no);
      }
      doc.kind = kind;
      doc.version = static_cast<int>(parse_double(version.substr(1), line_no));
      if (doc.version != 1) {
        throw ParseError("unsupported " + expected_kind + " version " +
                             version.substr(1),
                         line_no);
      }
      header_seen = true;
      continue;
    }
    const std::size_t comment = text.find('#');
    if (comment != std::string::npos) {
      text = trim(text.substr(0, comment));
      if (text.empty()) {
        continue;
      }
    }
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ParseError("unterminated section header", line_no);
      }
      doc.sections.push_back({trim(text.substr(1, text.size() - 2)), line_no, {}});
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    doc.sections.back().entries.push_back(
        {trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line_no});
  }
  if (!header_seen) {
    throw ParseError("missing version header in " + path, 1);
  }
  return doc;
}

inline std::vector<double> parse_double_list(const std::string& value,
                                             std::size_t line) {
  std::vector<double> out;
  std::istringstream ss(value);
  std::string token;
  while (ss >> token) {
    out.push_back(parse_double(token, line));
  }
  return out;
}

inline int parse_int(const std::string& value, std::size_t line) {
  const double d = parse_double(value, line);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) {
    throw ParseError("expected an integer, got '" + value + "'", line);
  }
  return i;
}

/// "2:1, 3:0.5" -> radial terms (harmonic 2 amplitude 1, harmonic 3
/// amplitude 0.5). An empty value is an empty list.
inline std::vector<RadialTerm> parse_radial_terms(const std::string& value,
                                                  std::size_t line) {
  std::vector<RadialTerm> terms;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      continue;
    }
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw ParseError("expected 'harmonic:amplitude', got '" + item + "'",
                       line);
    }
    RadialTerm term;
    term.harmonic = parse_int(trim(item.substr(0, colon)), line);
    term.amplitude = parse_double(trim(item.substr(colon + 1)), line);
    if (term.harmonic < 1) {
      throw ParseError("harmonic must be >= 1", line);
    }
    terms.push_back(term);
  }
  return terms;
}

inline Vector2d parse_vec2(const std::string& value, std::size_t line) {
  const auto list = parse_double_list(value, line);
  if (list.size() != 2) {
    throw ParseError("expected two numbers", line);
  }
  return {list[0], list[1]};
}

inline void apply_topology_entry(DirectedTopology& topology, bool& preset_used,
                                 const KeyValue& kv) {
  if (kv.key == "agents") {
    return;  // handled by the caller in a first pass
  }
  if (kv.key == "preset") {
    if (kv.value == "chain") {
      topology = DirectedTopology::Chain(topology.n);
    } else if (kv.value == "chain-shortcut") {
      topology = DirectedTopology::ChainWithShortcut(topology.n);
    } else {
      throw ParseError("unknown topology preset '" + kv.value + "'", kv.line);
    }
    preset_used = true;
  } else if (kv.key == "edges") {
    std::istringstream ss(kv.value);
    std::string triple;
    while (std::getline(ss, triple, ',')) {
      triple = trim(triple);
      if (triple.empty()) {
        continue;
      }
      const auto nums = parse_double_list(triple, kv.line);
      if (nums.size() != 3) {
        throw ParseError("edge must be 'receiver sender weight'", kv.line);
      }
      try {
        topology.add_edge(static_cast<int>(nums[0]), static_cast<int>(nums[1]),
                          nums[2]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), kv.line);
      }
    }
  } else {
    throw ParseError("unknown topology key '" + kv.key + "'", kv.line);
  }
}

inline int find_agent_count(const Section& section) {
  for (const auto& kv : section.entries) {
    if (kv.key == "agents") {
      const int n = parse_int(kv.value, kv.line);
      if (n < 1) {
        throw ParseError("agents must be >= 1", kv.line);
      }
      return n;
    }
  }
  throw ParseError("topology section needs 'agents = <n>'", section.line);
}

struct CurveSectionResult {
  CurveSpec spec;
  std::optional<bool> spacing_inclusive;
};

CurveSectionResult parse_curve_section(const Section& section,
                                       const std::filesystem::path& base_dir);

}  // namespace detail

/// Parse a standalone topology file ("# curveform topology v1").
inline DirectedTopology read_topology_file(const std::string& path) {
  const auto doc = detail::read_document(path, "topology");
  // Accept keys at top level or inside a [topology] section.
  std::vector<const detail::Section*> sections;
  for (const auto& sec : doc.sections) {
    if (sec.name.empty() || sec.name == "topology") {
      sections.push_back(&sec);
    } else {
      throw ParseError("unexpected section [" + sec.name + "]", sec.line);
    }
  }
  int n = -1;
  for (const auto* sec : sections) {
    for (const auto& kv : sec->entries) {
      if (kv.key == "agents") {
        n = detail::parse_int(kv.value, kv.line);
      }
    }
  }
  if (n < 1) {
    throw ParseError("topology file needs 'agents = <n>'", 1);
  }
  DirectedTopology topology = DirectedTopology::Empty(n);
  bool preset_used = false;
  for (const auto* sec : sections) {
    for (const auto& kv : sec->entries) {
      detail::apply_topology_entry(topology, preset_used, kv);
    }
  }
  return topology;
}

struct CurveFile {
  BasisFamily family = BasisFamily::Fourier(1);
  VectorXd xi;
  std::optional<double> residual_max;
  std::optional<double> residual_rms;
};

/// Read a curve file: either explicit coefficients or an analytic generator
/// plus a sample count, resolved to coefficients on load.
inline CurveFile read_curve_file(const std::string& path);

/// Write a fitted (or constructed) coefficient vector with residual stats.
inline void write_curve_file(const std::string& path, const BasisFamily& family,
                             const VectorXd& xi,
                             std::optional<double> residual_max = std::nullopt,
                             std::optional<double> residual_rms = std::nullopt) {
  std::ofstream out(path);
  if (!out) {
    throw std::ios_base::failure("cannot write curve file: " + path);
  }
  out << "# curveform curve v1\n";
  if (family.kind == BasisKind::kFourier) {
    out << "family = fourier\n";
    out << "harmonics = " << family.order << "\n";
  } else {
    out << "family = polynomial\n";
    out << "degree = " << family.order << "\n";
  }
  out << "xi =";
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    out << ' ' << format_double(xi(i));
  }
  out << "\n";
  if (residual_max) {
    out << "residual_max = " << format_double(*residual_max) << "\n";
  }
  if (residual_rms) {
    out << "residual_rms = " << format_double(*residual_rms) << "\n";
  }
}

inline CurveFile read_curve_file(const std::string& path) {
  const auto doc = detail::read_document(path, "curve");
  const std::filesystem::path base_dir =
      std::filesystem::path(path).parent_path();
  CurveFile curve;
  detail::Section merged;
  for (const auto& sec : doc.sections) {
    if (!sec.name.empty()) {
      throw ParseError("unexpected section [" + sec.name + "]", sec.line);
    }
    for (const auto& kv : sec.entries) {
      if (kv.key == "residual_max") {
        curve.residual_max = parse_double(kv.value, kv.line);
      } else if (kv.key == "residual_rms") {
        curve.residual_rms = parse_double(kv.value, kv.line);
      } else if (kv.key == "start" || kv.key == "spacing") {
        throw ParseError("key '" + kv.key + "' is not valid in a curve file",
                         kv.line);
      } else {
        merged.entries.push_back(kv);
      }
    }
  }
  const detail::CurveSectionResult parsed =
      detail::parse_curve_section(merged, base_dir);
  try {
    const CurveStage stage = resolve_curve(parsed.spec);
    curve.family = stage.family;
    curve.xi = stage.xi;
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(e.what()) + " in " + path, 1);
  }
  return curve;
}

/// Parse a full scenario file. Paths inside the file (samples_csv,
/// coeff_file) are resolved relative to the scenario file's directory.
inline Scenario read_scenario_file(const std::string& path) {
  namespace fs = std::filesystem;
  const auto doc = detail::read_document(path, "scenario");
  const fs::path base_dir = fs::path(path).parent_path();

  Scenario sc;
  sc.name = fs::path(path).stem().string();
  std::optional<bool> spacing_inclusive;

  // Topology first: agent count gates everything else.
  const detail::Section* topo_section = nullptr;
  for (const auto& sec : doc.sections) {
    if (sec.name == "topology") {
      if (topo_section) {
        throw ParseError("duplicate [topology] section", sec.line);
      }
      topo_section = &sec;
    }
  }
  if (!topo_section) {
    throw ParseError("scenario needs a [topology] section", 1);
  }
  sc.n = detail::find_agent_count(*topo_section);
  sc.topology = DirectedTopology::Empty(sc.n);
  bool preset_used = false;
  for (const auto& kv : topo_section->entries) {
    detail::apply_topology_entry(sc.topology, preset_used, kv);
  }
  sc.disturbances.assign(static_cast<std::size_t>(sc.n), Disturbance{});

  for (const auto& sec : doc.sections) {
    if (sec.name.empty()) {
      if (!sec.entries.empty()) {
        throw ParseError("keys before any section", sec.entries.front().line);
      }
      continue;
    }
    if (sec.name == "topology") {
      continue;
    }
    if (sec.name == "gains") {
      for (const auto& kv : sec.entries) {
        if (kv.key == "k1") {
          sc.gains.k1 = parse_double(kv.value, kv.line);
        } else if (kv.key == "k2") {
          sc.gains.k2 = parse_double(kv.value, kv.line);
        } else if (kv.key == "ell") {
          sc.ell = parse_double(kv.value, kv.line);
        } else if (kv.key == "follower_form") {
          if (kv.value == "coefficient") {
            sc.follower_form = FollowerForm::kCoefficient;
          } else if (kv.value == "difference") {
            sc.follower_form = FollowerForm::kDifference;
          } else {
            throw ParseError("follower_form must be coefficient or difference",
                             kv.line);
          }
        } else {
          throw ParseError("unknown gains key '" + kv.key + "'", kv.line);
        }
      }
    } else if (sec.name == "disturbance") {
      for (const auto& kv : sec.entries) {
        if (kv.key == "d") {
          const Vector2d d = detail::parse_vec2(kv.value, kv.line);
          for (auto& di : sc.disturbances) {
            di = {d.x(), d.y()};
          }
        } else if (kv.key.rfind("d_", 0) == 0) {
          const int agent = detail::parse_int(kv.key.substr(2), kv.line);
          if (agent < 1 || agent > sc.n) {
            throw ParseError("disturbance agent index out of range", kv.line);
          }
          const Vector2d d = detail::parse_vec2(kv.value, kv.line);
          sc.disturbances[static_cast<std::size_t>(agent - 1)] = {d.x(), d.y()};
        } else {
          throw ParseError("unknown disturbance key '" + kv.key + "'", kv.line);
        }
      }
    } else if (sec.name == "integration") {
      for (const auto& kv : sec.entries) {
        if (kv.key == "dt") {
          sc.dt = parse_double(kv.value, kv.line);
        } else if (kv.key == "duration") {
          sc.duration = parse_double(kv.value, kv.line);
        } else if (kv.key == "method") {
          if (kv.value == "euler") {
            sc.integrator = Integrator::kEuler;
          } else if (kv.value == "rk4") {
            sc.integrator = Integrator::kRk4;
          } else {
            throw ParseError("method must be euler or rk4", kv.line);
          }
        } else if (kv.key == "saturation") {
          sc.saturation = parse_double(kv.value, kv.line);
        } else {
          throw ParseError("unknown integration key '" + kv.key + "'", kv.line);
        }
      }
    } else if (sec.name == "initial") {
      for (const auto& kv : sec.entries) {
        if (kv.key == "mode") {
          if (kv.value == "random_box") {
            sc.initial.mode = InitialMode::kRandomBox;
          } else if (kv.value == "explicit") {
            sc.initial.mode = InitialMode::kExplicit;
          } else if (kv.value == "on_curve") {
            sc.initial.mode = InitialMode::kOnCurve;
          } else {
            throw ParseError("mode must be random_box, explicit or on_curve",
                             kv.line);
          }
        } else if (kv.key == "seed") {
          const double seed = parse_double(kv.value, kv.line);
          sc.seed = static_cast<std::uint64_t>(seed);
        } else if (kv.key == "box") {
          const auto b = detail::parse_double_list(kv.value, kv.line);
          if (b.size() != 4) {
            throw ParseError("box needs 'xmin xmax ymin ymax'", kv.line);
          }
          sc.initial.box = {b[0], b[1], b[2], b[3]};
        } else if (kv.key == "theta") {
          sc.initial.theta = parse_double(kv.value, kv.line);
        } else if (kv.key == "dhat") {
          const Vector2d d0 = detail::parse_vec2(kv.value, kv.line);
          sc.initial.delta_hat0.assign(static_cast<std::size_t>(sc.n), d0);
        } else if (kv.key.rfind("agent_", 0) == 0) {
          const int agent = detail::parse_int(kv.key.substr(6), kv.line);
          if (agent < 1 || agent > sc.n) {
            throw ParseError("initial agent index out of range", kv.line);
          }
          const auto vals = detail::parse_double_list(kv.value, kv.line);
          if (vals.size() != 3) {
            throw ParseError("agent_<i> needs 'x y theta'", kv.line);
          }
          sc.initial.states.resize(static_cast<std::size_t>(sc.n));
          sc.initial.states[static_cast<std::size_t>(agent - 1)] = {
              vals[0], vals[1], vals[2]};
        } else {
          throw ParseError("unknown initial key '" + kv.key + "'", kv.line);
        }
      }
    } else if (sec.name == "curve") {
      detail::CurveSectionResult parsed =
          detail::parse_curve_section(sec, base_dir);
      if (parsed.spacing_inclusive) {
        spacing_inclusive = parsed.spacing_inclusive;
      }
      sc.curves.push_back(std::move(parsed.spec));
    } else {
      throw ParseError("unknown section [" + sec.name + "]", sec.line);
    }
  }
  if (spacing_inclusive) {
    sc.endpoint_inclusive = *spacing_inclusive;
  }
  return sc;
}

namespace detail {

inline CurveSectionResult parse_curve_section(
    const Section& section, const std::filesystem::path& base_dir) {
  CurveSectionResult result;
  CurveSpec& spec = result.spec;
  std::optional<std::string> family;
  std::optional<int> order;
  std::optional<std::string> generator;
  RadialFourierGenerator radial;
  BezierGenerator bezier;
  bool bezier_point_seen[4] = {false, false, false, false};
  for (const auto& kv : section.entries) {
    if (kv.key == "start") {
      spec.start_time = parse_double(kv.value, kv.line);
    } else if (kv.key == "family") {
      family = kv.value;
    } else if (kv.key == "harmonics" || kv.key == "degree") {
      order = parse_int(kv.value, kv.line);
    } else if (kv.key == "generator") {
      generator = kv.value;
    } else if (kv.key == "fit_samples" || kv.key == "samples") {
      spec.fit_samples = parse_int(kv.value, kv.line);
    } else if (kv.key == "coefficients" || kv.key == "xi") {
      const auto values = parse_double_list(kv.value, kv.line);
      spec.coefficients = Eigen::Map<const VectorXd>(
          values.data(), static_cast<Eigen::Index>(values.size()));
    } else if (kv.key == "coeff_file") {
      const CurveFile file = read_curve_file((base_dir / kv.value).string());
      family = file.family.kind == BasisKind::kFourier ? "fourier"
                                                       : "polynomial";
      order = file.family.order;
      spec.coefficients = file.xi;
    } else if (kv.key == "samples_csv") {
      spec.samples = read_samples_csv((base_dir / kv.value).string());
    } else if (kv.key == "x_const") {
      radial.x_const = parse_double(kv.value, kv.line);
    } else if (kv.key == "y_const") {
      radial.y_const = parse_double(kv.value, kv.line);
    } else if (kv.key == "x_cos") {
      radial.x_cos = parse_radial_terms(kv.value, kv.line);
    } else if (kv.key == "x_sin") {
      radial.x_sin = parse_radial_terms(kv.value, kv.line);
    } else if (kv.key == "y_cos") {
      radial.y_cos = parse_radial_terms(kv.value, kv.line);
    } else if (kv.key == "y_sin") {
      radial.y_sin = parse_radial_terms(kv.value, kv.line);
    } else if (kv.key == "center") {
      radial.center = parse_vec2(kv.value, kv.line);
    } else if (kv.key == "p1" || kv.key == "p2" || kv.key == "p3" ||
               kv.key == "p4") {
      const int idx = kv.key[1] - '1';
      bezier.control[static_cast<std::size_t>(idx)] =
          parse_vec2(kv.value, kv.line);
      bezier_point_seen[idx] = true;
    } else if (kv.key == "spacing") {
      if (kv.value == "standard") {
        result.spacing_inclusive = false;
      } else if (kv.value == "endpoint_inclusive") {
        result.spacing_inclusive = true;
      } else {
        throw ParseError("spacing must be standard or endpoint_inclusive",
                         kv.line);
      }
    } else {
      throw ParseError("unknown curve key '" + kv.key + "'", kv.line);
    }
  }
  if (!family || !order) {
    throw ParseError("curve definition needs family and harmonics/degree",
                     section.line);
  }
  if (*family == "fourier") {
    spec.family = BasisFamily::Fourier(*order);
  } else if (*family == "polynomial") {
    spec.family = BasisFamily::Polynomial(*order);
  } else {
    throw ParseError("unknown family '" + *family + "'", section.line);
  }
  if (generator) {
    if (*generator == "radial") {
      spec.radial = radial;
    } else if (*generator == "bezier") {
      for (int k = 0; k < 4; ++k) {
        if (!bezier_point_seen[k]) {
          throw ParseError("bezier generator needs p1..p4", section.line);
        }
      }
      spec.bezier = bezier;
    } else {
      throw ParseError("unknown generator '" + *generator + "'",
                       section.line);
    }
  }
  return result;
}

}  // namespace detail

}  // namespace curveform
