#include "superlap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "superlap/error.hpp"

namespace superlap {

namespace {

const std::set<std::string> kSections = {"domain", "measure", "problem", "command"};

const std::set<std::string> kKeys = {
    "domain.dim",      "domain.box",        "domain.n",          "domain.mask",
    "measure.preset",  "measure.s",         "measure.alpha",     "measure.atoms",
    "measure.s_bar",   "measure.s_sharp",   "measure.K",         "measure.s0",
    "measure.kbar",    "measure.tail_scale", "measure.density",  "measure.quad_order",
    "measure.gamma",   "problem.p",         "problem.lambda",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  std::istringstream in(s);
  in >> out;
  return !in.fail() && in.eof();
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cf;
  cf.origin_ = origin;
  std::istringstream in(text);
  std::string section;
  int line_no = 0;
  auto err = [&](const std::string& msg) {
    throw Error(ErrorCode::Config, origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) err("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) err("expected 'key = value', got '" + line + "'");
    if (section.empty()) err("key outside of any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (section != "command" && !kKeys.count(key)) err("unknown key '" + key + "'");
    if (cf.entries_.count(key)) err("duplicate key '" + key + "'");
    cf.entries_[key] = {trim(line.substr(eq + 1)), line_no};
  }
  return cf;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Config, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigFile::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos, ErrorCode::Config, "override must look like section.key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  require(dot != std::string::npos && kSections.count(key.substr(0, dot)), ErrorCode::Config,
          "override key must be section.key: " + key);
  require(key.rfind("command.", 0) == 0 || kKeys.count(key), ErrorCode::Config, "unknown key '" + key + "'");
  require(split_tokens(value).size() <= 1 || key == "problem.lambda", ErrorCode::Config,
          "overrides apply to scalar fields only: " + key);
  entries_[key] = {value, 0};
}

void ConfigFile::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  std::string where = origin_;
  if (it != entries_.end()) where += it->second.line > 0 ? ":" + std::to_string(it->second.line) : " (override)";
  throw Error(ErrorCode::Config, where + ": " + key + ": " + message);
}

std::string ConfigFile::str(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

std::optional<double> ConfigFile::maybe_num(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  double v = 0.0;
  if (!parse_double(it->second.value, v)) fail(key, "expected a number, got '" + it->second.value + "'");
  return v;
}

double ConfigFile::num(const std::string& key, double fallback) const { return maybe_num(key).value_or(fallback); }

int ConfigFile::integer(const std::string& key, int fallback) const {
  const auto v = maybe_num(key);
  if (!v) return fallback;
  if (*v != std::floor(*v)) fail(key, "expected an integer");
  return static_cast<int>(*v);
}

std::vector<double> ConfigFile::list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (const auto& tok : split_tokens(it->second.value)) {
    double v = 0.0;
    if (!parse_double(tok, v)) fail(key, "expected a list of numbers, bad entry '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

LambdaSpec parse_lambda(const std::string& text) {
  LambdaSpec spec;
  std::string t = trim(text);
  if (t.rfind("auto", 0) == 0) {
    t = trim(t.substr(4));
    if (!t.empty() && t.front() == ':') t = trim(t.substr(1));
    const auto star = t.find('*');
    double factor = 1.0;
    std::string tail = t;
    if (star != std::string::npos) {
      require(parse_double(trim(t.substr(0, star)), factor), ErrorCode::Config, "bad lambda factor in '" + text + "'");
      tail = trim(t.substr(star + 1));
    }
    require(tail == "lambda1", ErrorCode::Config, "lambda auto form is 'auto: <factor>*lambda1', got '" + text + "'");
    spec.factor_of_lambda1 = factor;
    return spec;
  }
  require(parse_double(t, spec.value), ErrorCode::Config, "lambda must be a number or 'auto: f*lambda1'");
  return spec;
}

RunConfig interpret(ConfigFile file) {
  RunConfig rc;
  rc.dim = file.integer("domain.dim", 1);
  if (rc.dim != 1 && rc.dim != 2) file.fail("domain.dim", "dimension must be 1 or 2");
  const auto box = file.list("domain.box", rc.dim == 1 ? std::vector<double>{0, 1} : std::vector<double>{0, 1, 0, 1});
  if (box.size() != static_cast<std::size_t>(2 * rc.dim)) file.fail("domain.box", "needs 2*dim numbers");
  std::copy(box.begin(), box.end(), rc.box.begin());
  if (rc.dim == 1) rc.box[2] = rc.box[3] = 0.0;
  rc.cells = file.integer("domain.n", 64);
  if (rc.cells < 2) file.fail("domain.n", "need at least 2 cells per axis");

  const auto mask = split_tokens(file.str("domain.mask", "full"));
  const std::string kind = mask.empty() ? "full" : mask[0];
  std::vector<double> params;
  for (std::size_t i = 1; i < mask.size(); ++i) {
    double v = 0.0;
    if (!parse_double(mask[i], v)) file.fail("domain.mask", "bad mask parameter '" + mask[i] + "'");
    params.push_back(v);
  }
  auto need = [&](std::size_t n) {
    if (params.size() != n) file.fail("domain.mask", kind + " mask takes " + std::to_string(n) + " numbers");
  };
  if (kind == "full") {
    need(0);
  } else if (kind == "interval") {
    need(2);
    rc.mask.kind = MaskKind::Interval;
  } else if (kind == "rectangle") {
    need(4);
    rc.mask.kind = MaskKind::Rectangle;
  } else if (kind == "disk") {
    need(3);
    rc.mask.kind = MaskKind::Disk;
  } else {
    file.fail("domain.mask", "unknown mask '" + kind + "' (full, interval, rectangle, disk)");
  }
  std::copy(params.begin(), params.end(), rc.mask.params.begin());

  rc.p = file.num("problem.p", 2.0);
  if (!(rc.p > 1.0)) file.fail("problem.p", "p must exceed 1");
  try {
    rc.lambda = parse_lambda(file.str("problem.lambda", "0"));
  } catch (const Error& e) {
    file.fail("problem.lambda", e.what());
  }
  if (file.has("command.seed")) {
    const std::string text = file.str("command.seed", "1");
    try {
      std::size_t used = 0;
      rc.seed = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      file.fail("command.seed", "seed must be a nonnegative integer");
    }
  }
  rc.file = std::move(file);
  return rc;
}

Domain RunConfig::domain() const {
  try {
    return Domain(dim, box, (box[1] - box[0]) / cells, mask);
  } catch (const Error& e) {
    file.fail("domain.n", e.what());
  }
}

PresetMeasure preset_measure(const ConfigFile& f) {
  const std::string preset = f.str("measure.preset", "C1");
  PresetMeasure pm;
  const double s = f.num("measure.s", 0.5);
  if (!(s >= 0.0 && s <= 1.0)) f.fail("measure.s", "order must lie in [0,1]");

  if (preset == "C1") {
    pm.measure = SpectralMeasure::from_signed({{1.0, 1.0}});
  } else if (preset == "C2") {
    pm.measure = SpectralMeasure::from_signed({{s, 1.0}});
    pm.s_bar = s;
  } else if (preset == "C3") {
    if (s >= 1.0) f.fail("measure.s", "C3 needs s < 1");
    pm.measure = SpectralMeasure::from_signed({{1.0, 1.0}, {s, 1.0}});
  } else if (preset == "C5") {
    if (s >= 1.0) f.fail("measure.s", "C5 needs s < 1");
    const double alpha = f.num("measure.alpha", 0.1);
    pm.measure = SpectralMeasure::from_signed({{1.0, 1.0}, {s, -alpha}});
  } else if (preset == "serie1" || preset == "serie2") {
    // s_k = s0/(k+1), c_k = 2^{-(k+1)}; serie2 flips the sign of the tail
    // beyond kbar and scales it by tail_scale.
    const double s0 = f.num("measure.s0", 0.9);
    if (!(s0 > 0.0 && s0 <= 1.0)) f.fail("measure.s0", "s0 must lie in (0,1]");
    const int K = f.integer("measure.K", 8);
    const int kbar = f.integer("measure.kbar", 2);
    const double tail_scale = f.num("measure.tail_scale", 0.5);
    if (preset == "serie2" && (kbar < 0 || kbar + 1 >= K)) f.fail("measure.kbar", "need 0 <= kbar < K-1");
    std::vector<double> orders, weights;
    const int terms = std::max(K, 60);
    for (int k = 0; k < terms; ++k) {
      orders.push_back(s0 / (k + 1));
      double c = std::ldexp(1.0, -(k + 1));
      if (preset == "serie2" && k > kbar) c *= -tail_scale;
      weights.push_back(c);
    }
    double sum = 0.0;
    for (double w : weights) sum += w;
    try {
      auto tr = truncate_series(orders, weights, K, sum);
      pm.measure = tr.measure;
    } catch (const Error& e) {
      f.fail("measure.K", e.what());
    }
    pm.s_bar = preset == "serie1" ? s0 : orders[kbar];
  } else if (preset == "function") {
    // f = 1 on (s_sharp,1], -gamma (1-s_sharp)/s_sharp on [0,s_sharp].
    const double cut = f.num("measure.s_sharp", 0.4);
    if (!(cut > 0.0 && cut < 1.0)) f.fail("measure.s_sharp", "function preset needs s_sharp in (0,1)");
    const double gamma = f.num("measure.gamma", 0.1);
    DensityTable t;
    t.quad_order = f.integer("measure.quad_order", 8);
    const double neg = -gamma * (1.0 - cut) / cut;
    t.s = {0.0, cut, cut, 1.0};
    t.f = {neg, neg, 1.0, 1.0};
    pm.measure.density = t;
    pm.s_bar = cut;
    pm.s_sharp = cut;
  } else if (preset == "custom") {
    std::vector<MeasureAtom> atoms;
    for (const auto& tok : split_tokens(f.str("measure.atoms", ""))) {
      const auto colon = tok.find(':');
      MeasureAtom a;
      if (colon == std::string::npos || !parse_double(tok.substr(0, colon), a.order) ||
          !parse_double(tok.substr(colon + 1), a.weight))
        f.fail("measure.atoms", "atoms are 'order:weight' pairs, bad entry '" + tok + "'");
      if (!(a.order >= 0.0 && a.order <= 1.0)) f.fail("measure.atoms", "atom order outside [0,1]");
      if (a.weight == 0.0) f.fail("measure.atoms", "atom weight must be nonzero");
      atoms.push_back(a);
    }
    if (f.has("measure.density")) {
      DensityTable t;
      t.quad_order = f.integer("measure.quad_order", 8);
      for (const auto& tok : split_tokens(f.str("measure.density", ""))) {
        const auto colon = tok.find(':');
        double a = 0.0, b = 0.0;
        if (colon == std::string::npos || !parse_double(tok.substr(0, colon), a) || !parse_double(tok.substr(colon + 1), b))
          f.fail("measure.density", "density samples are 's:f' pairs, bad entry '" + tok + "'");
        t.s.push_back(a);
        t.f.push_back(b);
      }
      pm.measure.density = t;
    }
    if (atoms.empty() && !pm.measure.density) f.fail("measure.atoms", "custom measure needs atoms or a density");
    auto density = pm.measure.density;
    pm.measure = SpectralMeasure::from_signed(atoms);
    pm.measure.density = density;
  } else {
    f.fail("measure.preset", "unknown preset '" + preset + "' (C1, C2, C3, C5, serie1, serie2, function, custom)");
  }
  if (f.has("measure.s_bar")) pm.s_bar = f.num("measure.s_bar", pm.s_bar);
  if (preset != "function" && f.has("measure.s_sharp")) pm.s_sharp = f.num("measure.s_sharp", 1.0);
  if (!(pm.s_bar > 0.0 && pm.s_bar <= 1.0)) f.fail("measure.s_bar", "s_bar must lie in (0,1]");
  return pm;
}

ValidatedMeasure RunConfig::measure() const {
  const PresetMeasure pm = preset_measure(file);
  try {
    return validate(pm.measure, pm.s_bar, pm.s_sharp);
  } catch (const Error& e) {
    // Measure-condition failures keep their code; the message gains the config location.
    const auto it = file.entries().find("measure.preset");
    const std::string where = file.origin() + (it != file.entries().end() && it->second.line > 0
                                                   ? ":" + std::to_string(it->second.line)
                                                   : "");
    throw Error(e.code(), where + ": measure: " + e.what());
  }
}

}  // namespace superlap
