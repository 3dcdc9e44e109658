#pragma once

// Scenario files: a line-oriented key/value format with [section] headers that
// describes one defeaturing experiment (domain, features, problem data as
// arithmetic expressions, mesh sizes, adaptive settings). The format
// round-trips: parse(serialize(s)) == s. Built-in scenarios reproduce the
// 2D experiments the estimator was calibrated against.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "defeature/cli/expression.hpp"
#include "defeature/pipeline/pipeline.hpp"

namespace defeature::cli {

using geom::Point;

struct ShapeSpec {
  enum class Kind { Rect, Circle, Polygon };
  Kind kind = Kind::Rect;
  std::vector<double> p;  // rect: x0 y0 x1 y1; circle: cx cy r; polygon: x y pairs
  int segments = 64;      // circle tessellation

  geom::PolygonSet to_set() const {
    switch (kind) {
      case Kind::Rect: return geom::make_set(geom::make_rect(p[0], p[1], p[2], p[3]));
      case Kind::Circle: return geom::make_set(geom::make_circle(p[0], p[1], p[2], segments));
      case Kind::Polygon: {
        geom::Ring r;
        for (size_t i = 0; i + 1 < p.size(); i += 2) r.push_back({p[i], p[i + 1]});
        return geom::make_set(r);
      }
    }
    return {};
  }
};

struct FeatureBlock {
  int id = 0;
  std::vector<ShapeSpec> negative;
  std::vector<ShapeSpec> positive;
  std::string extension = "bbox";  // bbox | identity (positive parts only)
};

struct Scenario {
  std::string name;
  int version = 1;
  ShapeSpec outline;                     // rect only
  std::vector<std::string> dirichlet;    // side names: bottom/left/right/top/all/none
  std::string type = "poisson";          // poisson | elasticity | stokes
  double mu = 1.0;
  double lambda = 0.0;
  std::map<std::string, std::string> data;  // expression text per data key
  std::vector<FeatureBlock> features;
  double h = 0.05;
  double h_feature = 0.0;  // near-feature size of the analysis meshes; 0 -> auto
  double h_ref = 0.0;      // near-boundary size of the reference mesh; 0 -> h/8
  bool adaptive = false;
  double theta = 0.9;
  double tol = 0.0;
  int max_iter = 64;
  bool vtk = false;

  int ncomp() const { return type == "poisson" ? 1 : 2; }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_shape(const ShapeSpec& s) {
  std::string out;
  switch (s.kind) {
    case ShapeSpec::Kind::Rect: out = "rect"; break;
    case ShapeSpec::Kind::Circle: out = "circle"; break;
    case ShapeSpec::Kind::Polygon: out = "polygon"; break;
  }
  for (double v : s.p) out += " " + fmt(v);
  if (s.kind == ShapeSpec::Kind::Circle) out += " " + std::to_string(s.segments);
  return out;
}

// Data keys admitted per problem type; missing optional keys default to "0".
inline std::vector<std::string> data_keys(const std::string& type) {
  if (type == "poisson")
    return {"f", "g_d", "g", "g_feature", "g_0", "g_tilde"};
  std::vector<std::string> keys;
  for (const char* base : {"f", "g_d", "g", "g_feature", "g_0", "g_tilde"}) {
    keys.push_back(std::string(base) + "_x");
    keys.push_back(std::string(base) + "_y");
  }
  if (type == "stokes") keys.push_back("f_c");
  return keys;
}

inline bool required_key(const std::string& key) {
  return key == "f" || key == "g_d" || key == "g" ||
         key == "f_x" || key == "f_y" || key == "g_d_x" || key == "g_d_y" ||
         key == "g_x" || key == "g_y";
}

}  // namespace detail

inline std::string serialize(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "name = " << s.name << "\n"
      << "version = " << s.version << "\n\n";
  out << "[domain]\n"
      << "outline = " << detail::fmt_shape(s.outline) << "\n"
      << "dirichlet =";
  for (const std::string& side : s.dirichlet) out << " " << side;
  out << "\n\n";
  out << "[problem]\n"
      << "type = " << s.type << "\n"
      << "mu = " << detail::fmt(s.mu) << "\n";
  if (s.type == "elasticity") out << "lambda = " << detail::fmt(s.lambda) << "\n";
  out << "\n[data]\n";
  for (const std::string& key : detail::data_keys(s.type)) {
    auto it = s.data.find(key);
    if (it != s.data.end()) out << key << " = " << it->second << "\n";
  }
  for (const FeatureBlock& f : s.features) {
    out << "\n[feature]\n"
        << "id = " << f.id << "\n";
    for (const ShapeSpec& sh : f.negative) out << "negative = " << detail::fmt_shape(sh) << "\n";
    for (const ShapeSpec& sh : f.positive) out << "positive = " << detail::fmt_shape(sh) << "\n";
    if (!f.positive.empty()) out << "extension = " << f.extension << "\n";
  }
  out << "\n[mesh]\n"
      << "h = " << detail::fmt(s.h) << "\n";
  if (s.h_feature > 0) out << "h_feature = " << detail::fmt(s.h_feature) << "\n";
  if (s.h_ref > 0) out << "h_ref = " << detail::fmt(s.h_ref) << "\n";
  if (s.adaptive) {
    out << "\n[adaptive]\n"
        << "theta = " << detail::fmt(s.theta) << "\n"
        << "tol = " << detail::fmt(s.tol) << "\n"
        << "max_iter = " << s.max_iter << "\n";
  }
  if (s.vtk) out << "\n[output]\nvtk = 1\n";
  return out.str();
}

namespace detail {

struct LineReader {
  std::istringstream in;
  int lineno = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // next non-empty line with comments stripped; false at end of input
  bool next(std::string& line) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++lineno;
      size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      size_t b = raw.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      size_t e = raw.find_last_not_of(" \t\r");
      line = raw.substr(b, e - b + 1);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
  }

  [[noreturn]] void bad_schema(const std::string& what) const {
    throw SchemaError("line " + std::to_string(lineno) + ": " + what);
  }
};

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double to_double(LineReader& r, const std::string& tok) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) r.fail("malformed number '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    r.fail("malformed number '" + tok + "'");
  }
}

inline int to_int(LineReader& r, const std::string& tok) {
  double v = to_double(r, tok);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) r.fail("expected an integer, got '" + tok + "'");
  return i;
}

inline ShapeSpec parse_shape(LineReader& r, const std::string& value) {
  std::vector<std::string> toks = split_ws(value);
  if (toks.empty()) r.fail("empty shape");
  ShapeSpec s;
  if (toks[0] == "rect") {
    s.kind = ShapeSpec::Kind::Rect;
    if (toks.size() != 5) r.fail("rect needs 4 numbers: x0 y0 x1 y1");
    for (int i = 1; i <= 4; ++i) s.p.push_back(to_double(r, toks[static_cast<size_t>(i)]));
    if (s.p[0] >= s.p[2] || s.p[1] >= s.p[3]) r.bad_schema("degenerate rect");
  } else if (toks[0] == "circle") {
    s.kind = ShapeSpec::Kind::Circle;
    if (toks.size() != 5) r.fail("circle needs cx cy r segments");
    for (int i = 1; i <= 3; ++i) s.p.push_back(to_double(r, toks[static_cast<size_t>(i)]));
    s.segments = to_int(r, toks[4]);
    if (s.p[2] <= 0) r.bad_schema("circle radius must be positive");
    if (s.segments < 8) r.bad_schema("circle needs at least 8 segments");
  } else if (toks[0] == "polygon") {
    s.kind = ShapeSpec::Kind::Polygon;
    if (toks.size() < 7 || (toks.size() - 1) % 2 != 0)
      r.fail("polygon needs at least 3 x y pairs");
    for (size_t i = 1; i < toks.size(); ++i) s.p.push_back(to_double(r, toks[i]));
  } else {
    r.fail("unknown shape '" + toks[0] + "'");
  }
  return s;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  detail::LineReader r(text);
  Scenario s;
  s.h = 0.0;  // required in [mesh]
  std::string section;
  std::string line;
  bool seen_scenario = false, seen_domain = false, seen_problem = false, seen_mesh = false;
  FeatureBlock* feat = nullptr;

  auto sides_ok = [](const std::string& v) {
    return v == "bottom" || v == "left" || v == "right" || v == "top" ||
           v == "all" || v == "none";
  };

  while (r.next(line)) {
    if (line.front() == '[') {
      if (line.back() != ']') r.fail("unterminated section header");
      section = line.substr(1, line.size() - 2);
      feat = nullptr;
      if (section == "scenario") seen_scenario = true;
      else if (section == "domain") seen_domain = true;
      else if (section == "problem") seen_problem = true;
      else if (section == "mesh") seen_mesh = true;
      else if (section == "adaptive") s.adaptive = true;
      else if (section == "feature") {
        s.features.emplace_back();
        feat = &s.features.back();
      } else if (section != "data" && section != "output") {
        r.bad_schema("unknown section [" + section + "]");
      }
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) r.fail("expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    size_t vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);
    if (key.empty()) r.fail("empty key");
    if (section.empty()) r.fail("key before any [section]");

    if (section == "scenario") {
      if (key == "name") s.name = value;
      else if (key == "version") s.version = detail::to_int(r, value);
      else r.bad_schema("unknown key '" + key + "' in [scenario]");
    } else if (section == "domain") {
      if (key == "outline") {
        s.outline = detail::parse_shape(r, value);
        if (s.outline.kind != ShapeSpec::Kind::Rect)
          r.bad_schema("outline must be a rect");
      } else if (key == "dirichlet") {
        s.dirichlet = detail::split_ws(value);
        for (const std::string& side : s.dirichlet)
          if (!sides_ok(side)) r.bad_schema("unknown side '" + side + "'");
      } else {
        r.bad_schema("unknown key '" + key + "' in [domain]");
      }
    } else if (section == "problem") {
      if (key == "type") {
        if (value != "poisson" && value != "elasticity" && value != "stokes")
          r.bad_schema("unknown problem type '" + value + "'");
        s.type = value;
      } else if (key == "mu") {
        s.mu = detail::to_double(r, value);
        if (s.mu <= 0) r.bad_schema("mu must be positive");
      } else if (key == "lambda") {
        s.lambda = detail::to_double(r, value);
      } else {
        r.bad_schema("unknown key '" + key + "' in [problem]");
      }
    } else if (section == "data") {
      s.data[key] = value;  // keys validated against the type afterwards
    } else if (section == "feature") {
      if (key == "id") feat->id = detail::to_int(r, value);
      else if (key == "negative") feat->negative.push_back(detail::parse_shape(r, value));
      else if (key == "positive") feat->positive.push_back(detail::parse_shape(r, value));
      else if (key == "extension") {
        if (value != "bbox" && value != "identity")
          r.bad_schema("extension must be 'bbox' or 'identity'");
        feat->extension = value;
      } else r.bad_schema("unknown key '" + key + "' in [feature]");
    } else if (section == "mesh") {
      if (key == "h") s.h = detail::to_double(r, value);
      else if (key == "h_feature") s.h_feature = detail::to_double(r, value);
      else if (key == "h_ref") s.h_ref = detail::to_double(r, value);
      else r.bad_schema("unknown key '" + key + "' in [mesh]");
    } else if (section == "adaptive") {
      if (key == "theta") s.theta = detail::to_double(r, value);
      else if (key == "tol") s.tol = detail::to_double(r, value);
      else if (key == "max_iter") s.max_iter = detail::to_int(r, value);
      else r.bad_schema("unknown key '" + key + "' in [adaptive]");
    } else if (section == "output") {
      if (key == "vtk") s.vtk = detail::to_int(r, value) != 0;
      else r.bad_schema("unknown key '" + key + "' in [output]");
    }
  }

  if (!seen_scenario || s.name.empty()) throw SchemaError("missing [scenario] name");
  if (s.version != 1) throw SchemaError("unsupported scenario version " + std::to_string(s.version));
  if (!seen_domain) throw SchemaError("missing [domain] section");
  if (!seen_problem) throw SchemaError("missing [problem] section");
  if (!seen_mesh || s.h <= 0) throw SchemaError("missing or invalid mesh size h");
  if (s.adaptive && (s.theta <= 0 || s.theta > 1))
    throw SchemaError("theta must be in (0, 1]");
  if (s.adaptive && (s.tol < 0 || s.max_iter < 1))
    throw SchemaError("invalid adaptive settings");

  // data keys: reject strangers, demand the essential ones, check expressions
  std::vector<std::string> keys = detail::data_keys(s.type);
  for (const auto& [key, text_] : s.data) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw SchemaError("data key '" + key + "' does not apply to a " + s.type + " problem");
  }
  for (const std::string& key : keys) {
    auto it = s.data.find(key);
    if (it == s.data.end()) {
      if (detail::required_key(key)) throw SchemaError("missing data key '" + key + "'");
      continue;
    }
    expr::Expression ex = expr::Expression::parse(it->second);  // throws ExpressionError
    (void)ex(0.25, 0.75);
  }

  // feature sanity
  std::vector<int> ids;
  for (const FeatureBlock& f : s.features) {
    if (f.negative.empty() && f.positive.empty())
      throw SchemaError("feature " + std::to_string(f.id) + " has no shapes");
    if (std::find(ids.begin(), ids.end(), f.id) != ids.end())
      throw SchemaError("duplicate feature id " + std::to_string(f.id));
    ids.push_back(f.id);
  }
  std::string ext;
  for (const FeatureBlock& f : s.features)
    if (!f.positive.empty()) {
      if (!ext.empty() && ext != f.extension)
        throw SchemaError("mixed extension policies are not supported");
      ext = f.extension;
    }
  return s;
}

inline bool operator==(const Scenario& a, const Scenario& b) {
  return serialize(a) == serialize(b);
}

// ---- conversion to solver inputs ----------------------------------------

inline pipeline::ProblemData problem_data(const Scenario& s) {
  pipeline::ProblemData d;
  d.coefs.type = s.type == "poisson"  ? fem::ProblemType::Poisson
                 : s.type == "stokes" ? fem::ProblemType::Stokes
                                      : fem::ProblemType::Elasticity;
  d.coefs.mu = s.mu;
  d.coefs.lambda = s.lambda;

  auto fun = [&s](const std::string& key) -> fem::ScalarFun {
    auto it = s.data.find(key);
    if (it == s.data.end() || it->second == "0") return pipeline::zero_fun();
    auto ex = std::make_shared<expr::Expression>(expr::Expression::parse(it->second));
    return [ex](Point p) { return (*ex)(p.x, p.y); };
  };

  if (s.ncomp() == 1) {
    d.f[0] = fun("f");
    d.g_dir[0] = fun("g_d");
    d.g_neu[0] = fun("g");
    d.g_feat[0] = fun("g_feature");
    d.g_zero[0] = fun("g_0");
    d.g_tilde[0] = fun("g_tilde");
  } else {
    const char* suffix[2] = {"_x", "_y"};
    for (int c = 0; c < 2; ++c) {
      auto sc = static_cast<size_t>(c);
      d.f[sc] = fun(std::string("f") + suffix[c]);
      d.g_dir[sc] = fun(std::string("g_d") + suffix[c]);
      d.g_neu[sc] = fun(std::string("g") + suffix[c]);
      d.g_feat[sc] = fun(std::string("g_feature") + suffix[c]);
      d.g_zero[sc] = fun(std::string("g_0") + suffix[c]);
      d.g_tilde[sc] = fun(std::string("g_tilde") + suffix[c]);
    }
    if (s.type == "stokes") d.f_c = fun("f_c");
  }
  return d;
}

inline geom::GeometryModel geometry_model(const Scenario& s) {
  geom::PolygonSet omega0 = s.outline.to_set();
  std::vector<geom::Feature> feats;
  for (const FeatureBlock& fb : s.features) {
    geom::Feature f;
    f.id = fb.id;
    for (const ShapeSpec& sh : fb.negative) f.negative = geom::set_union(f.negative, sh.to_set());
    for (const ShapeSpec& sh : fb.positive) f.positive = geom::set_union(f.positive, sh.to_set());
    feats.push_back(std::move(f));
  }
  geom::PolygonSet exact = geom::exact_from_defeatured(omega0, feats);

  const std::vector<double>& b = s.outline.p;  // x0 y0 x1 y1
  double tol = 1e-9 * std::hypot(b[2] - b[0], b[3] - b[1]);
  std::vector<std::string> sides = s.dirichlet;
  auto is_dir = [b, tol, sides](Point p) {
    for (const std::string& side : sides) {
      if (side == "all") return true;
      if (side == "none") return false;
      if (side == "bottom" && std::abs(p.y - b[1]) <= tol) return true;
      if (side == "top" && std::abs(p.y - b[3]) <= tol) return true;
      if (side == "left" && std::abs(p.x - b[0]) <= tol) return true;
      if (side == "right" && std::abs(p.x - b[2]) <= tol) return true;
    }
    return false;
  };

  geom::ExtensionPolicy policy = geom::ExtensionPolicy::BoundingBox;
  for (const FeatureBlock& fb : s.features)
    if (!fb.positive.empty() && fb.extension == "identity")
      policy = geom::ExtensionPolicy::Identity;
  return geom::build_model(exact, std::move(feats), is_dir, policy);
}

// ---- built-in scenarios --------------------------------------------------

namespace detail {

inline Scenario two_holes(bool circular) {
  Scenario s;
  s.name = circular ? "two_holes_circular" : "two_holes_square";
  s.outline = {ShapeSpec::Kind::Rect, {0, 0, 1, 1}};
  s.dirichlet = {"bottom", "left"};
  s.type = "poisson";
  // the source matches u0 = exp(-8(x+y)) exactly; the boundary data below are
  // the trace and the outward normal derivative of that field
  s.data["f"] = "-128*exp(-8*(x+y))";
  s.data["g_d"] = "exp(-8*(x+y))";
  s.data["g"] = "-8*exp(-8*(x+y))";
  s.data["g_feature"] = "0";
  s.data["g_0"] = "0";
  FeatureBlock f1, f2;
  f1.id = 1;
  f2.id = 2;
  if (circular) {
    f1.negative.push_back({ShapeSpec::Kind::Circle, {1.1e-3, 1.1e-3, 1e-3}, 64});
    f2.negative.push_back({ShapeSpec::Kind::Circle, {0.89, 0.89, 0.1}, 64});
  } else {
    f1.negative.push_back({ShapeSpec::Kind::Rect, {1e-4, 1e-4, 2.1e-3, 2.1e-3}});
    f2.negative.push_back({ShapeSpec::Kind::Rect, {0.79, 0.79, 0.99, 0.99}});
  }
  s.features = {f1, f2};
  s.h = 1.0 / 64;
  return s;
}

inline Scenario distance_delta(double delta, const std::string& tag) {
  Scenario s;
  s.name = "distance_delta_" + tag;
  s.outline = {ShapeSpec::Kind::Rect, {0, 0, 1, 1}};
  s.dirichlet = {"bottom"};
  s.type = "poisson";
  s.data["f"] = "0";
  s.data["g_d"] = "40*cos(pi*x)+10*cos(5*pi*x)";
  s.data["g"] = "0";
  s.data["g_feature"] = "0";
  s.data["g_0"] = "0";
  ShapeSpec pos{ShapeSpec::Kind::Rect, {0.4 - delta / 2, 1.0, 0.5 - delta / 2, 1.1}};
  ShapeSpec neg{ShapeSpec::Kind::Rect, {0.5 + delta / 2, 0.9, 0.6 + delta / 2, 1.0}};
  if (delta > 0) {
    // two separate features at distance delta
    FeatureBlock f1, f2;
    f1.id = 1;
    f1.positive.push_back(pos);
    f1.extension = "identity";
    f2.id = 2;
    f2.negative.push_back(neg);
    s.features = {f1, f2};
  } else {
    // touching or overlapping boundaries: a single two-component feature
    FeatureBlock f;
    f.id = 1;
    f.positive.push_back(pos);
    f.negative.push_back(neg);
    f.extension = "identity";
    s.features = {f};
  }
  s.h = 1.0 / 64;
  return s;
}

inline Scenario random_27() {
  Scenario s;
  s.name = "random_27";
  s.outline = {ShapeSpec::Kind::Rect, {0, 0, 1, 1}};
  s.dirichlet = {"bottom", "left"};
  s.type = "poisson";
  s.data["f"] = "-18*exp(-3*(x+y))";
  s.data["g_d"] = "exp(-3*(x+y))";
  s.data["g"] = "-3*exp(-3*(x+y))";
  s.data["g_feature"] = "0";
  s.data["g_0"] = "0";
  static const double c[27][3] = {
      {0.097984328699318, 0.092663690863534, 0.081318234590090},
      {0.283884293965162, 0.123563491365580, 0.066396825383881},
      {0.546112220339815, 0.056574896706227, 0.038919282299261},
      {0.715916527014347, 0.093265457598229, 0.074000758141615},
      {0.898581968051930, 0.104463986172862, 0.081763485970873},
      {0.067305141757723, 0.339769841694328, 0.060034479317649},
      {0.311761232757188, 0.303173986566693, 0.008499706450270},
      {0.495145556524009, 0.307616854246403, 0.092235800109005},
      {0.705998218664498, 0.248238323585443, 0.005359781531656},
      {0.886286875701112, 0.290351799644088, 0.052702495267737},
      {0.067359418419866, 0.534641171336466, 0.011885327661975},
      {0.328109457773039, 0.446027904596783, 0.038014299024100},
      {0.500590433180793, 0.509270838208646, 0.081283253301511},
      {0.743939933090058, 0.487966072170030, 0.024409591557169},
      {0.893169207667069, 0.507196247921792, 0.088442265909357},
      {0.110235870451937, 0.693080838594426, 0.071264679475915},
      {0.244342487141727, 0.677497408280121, 0.037814843808214},
      {0.545240931016100, 0.773012684854573, 0.024891961099593},
      {0.726683377942314, 0.732602609237550, 0.025285374523927},
      {0.920762287773320, 0.695958574121097, 0.066724359452694},
      {0.022384764760657, 0.823728658042989, 0.004986188504724},
      {0.325708044929628, 0.914763687652304, 0.068528856760891},
      {0.500755877184029, 0.910427640482701, 0.062027812215100},
      {0.705821367824273, 0.878409519462713, 0.074668462996873},
      {0.899163331742718, 0.898273740857340, 0.087725564834567},
      {0.4, 0.7, 0.02},
      {0.1, 0.9, 0.01},
  };
  for (int k = 0; k < 27; ++k) {
    FeatureBlock f;
    f.id = k + 1;
    f.negative.push_back({ShapeSpec::Kind::Circle, {c[k][0], c[k][1], c[k][2]}, 64});
    s.features.push_back(std::move(f));
  }
  s.h = 1.0 / 64;
  s.adaptive = true;
  s.theta = 0.95;
  s.tol = 0.0;
  s.max_iter = 64;
  return s;
}

inline Scenario shapes_stokes() {
  Scenario s;
  s.name = "shapes_stokes";
  s.outline = {ShapeSpec::Kind::Rect, {0, 0, 1, 1}};
  s.dirichlet = {"all"};
  s.type = "stokes";
  s.data["f_x"] = "exp(4*((x-0.5)^2+(y-0.5)^2))";
  s.data["f_y"] = "exp(4*((x-0.5)^2+(y-0.5)^2))";
  s.data["g_d_x"] = "0";
  s.data["g_d_y"] = "0";
  s.data["g_x"] = "0";
  s.data["g_y"] = "0";
  FeatureBlock f1, f2, f3;
  f1.id = 1;
  f1.negative.push_back({ShapeSpec::Kind::Circle, {0.375, 0.5, 0.0125}, 64});
  f2.id = 2;
  f2.negative.push_back({ShapeSpec::Kind::Rect, {0.4875, 0.3625, 0.5125, 0.3875}});
  f3.id = 3;
  f3.negative.push_back({ShapeSpec::Kind::Polygon,
                         {0.625, 0.5125, 0.6125, 0.4875, 0.625, 0.5, 0.6375, 0.4875}});
  s.features = {f1, f2, f3};
  s.h = 1.0 / 64;
  s.h_feature = 0.002;
  s.h_ref = 0.001;
  return s;
}

inline Scenario lid_cavity() {
  Scenario s;
  s.name = "lid_cavity";
  s.outline = {ShapeSpec::Kind::Rect, {0, 0, 1, 1}};
  s.dirichlet = {"all"};
  s.type = "stokes";
  s.data["f_x"] = "0";
  s.data["f_y"] = "0";
  // unit horizontal velocity on the lid, zero on the walls; the hat collapses
  // to an exact indicator at boundary dof locations
  s.data["g_d_x"] = "max(0, 1 - 1000000*abs(y-1))";
  s.data["g_d_y"] = "0";
  s.data["g_x"] = "0";
  s.data["g_y"] = "0";
  FeatureBlock f1, f2, f3;
  f1.id = 1;
  f1.negative.push_back({ShapeSpec::Kind::Circle, {0.011, 0.989, 0.01}, 64});
  f2.id = 2;
  f2.negative.push_back({ShapeSpec::Kind::Circle, {0.5, 0.75, 0.01}, 64});
  f3.id = 3;
  f3.negative.push_back({ShapeSpec::Kind::Circle, {0.011, 0.011, 0.01}, 64});
  s.features = {f1, f2, f3};
  s.h = 1.0 / 64;
  s.h_feature = 0.002;
  s.h_ref = 0.001;
  return s;
}

}  // namespace detail

// The umbrella name "distance_delta" expands to these five.
inline std::vector<std::string> distance_delta_names() {
  return {"distance_delta_0.2", "distance_delta_2e-4", "distance_delta_0",
          "distance_delta_-1e-3", "distance_delta_-9.9e-2"};
}

inline std::optional<Scenario> builtin_scenario(const std::string& name) {
  if (name == "two_holes_circular") return detail::two_holes(true);
  if (name == "two_holes_square") return detail::two_holes(false);
  if (name == "distance_delta_0.2") return detail::distance_delta(0.2, "0.2");
  if (name == "distance_delta_2e-4") return detail::distance_delta(2e-4, "2e-4");
  if (name == "distance_delta_0") return detail::distance_delta(0.0, "0");
  if (name == "distance_delta_-1e-3") return detail::distance_delta(-1e-3, "-1e-3");
  if (name == "distance_delta_-9.9e-2") return detail::distance_delta(-9.9e-2, "-9.9e-2");
  if (name == "random_27") return detail::random_27();
  if (name == "shapes_stokes") return detail::shapes_stokes();
  if (name == "lid_cavity") return detail::lid_cavity();
  return std::nullopt;
}

inline std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const char* name : {"two_holes_circular", "two_holes_square", "random_27",
                           "shapes_stokes", "lid_cavity"})
    out.push_back(*builtin_scenario(name));
  for (const std::string& name : distance_delta_names())
    out.push_back(*builtin_scenario(name));
  return out;
}

}  // namespace defeature::cli
