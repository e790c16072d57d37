#include "algcon/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "algcon/errors.hpp"

namespace algcon {

using nlohmann::json;

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::estimate: return "estimate";
    case Scenario::track: return "track";
    case Scenario::distributed: return "distributed";
    case Scenario::control: return "control";
    case Scenario::mac_sweep: return "mac-sweep";
    case Scenario::kw: return "kw";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  for (auto s : {Scenario::estimate, Scenario::track, Scenario::distributed, Scenario::control, Scenario::mac_sweep,
                 Scenario::kw}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<double> MacSweepParams::grid() const {
  std::vector<double> out;
  if (!(p_step > 0.0) || p_to < p_from) return out;
  const auto count = static_cast<std::size_t>(std::floor((p_to - p_from) / p_step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(p_from + static_cast<double>(i) * p_step);
  return out;
}

double ExperimentConfig::density() const {
  if (radio.rho > 0.0) return radio.rho;
  return static_cast<double>(topology.n) / (topology.width * topology.height);
}

RadioParams ExperimentConfig::resolved_radio() const {
  RadioParams r = radio;
  r.rho = density();
  return r;
}

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  double number(const std::string& key, double def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  std::optional<double> opt_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      throw ConfigError(field(key), "expected a nonnegative integer");
    }
    return v->get<std::size_t>();
  }

  int integer(const std::string& key, int def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v->get<int>();
  }

  bool flag(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = find(key);
    if (!v) return def;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array() || v->empty()) throw ConfigError(field(key), "expected a number or a nonempty list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(field(key), "expected a number or a nonempty list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> def) {
    const json* v = find(key);
    if (!v) return def;
    if (v->is_number_integer()) return {v->get<int>()};
    if (!v->is_array() || v->empty()) throw ConfigError(field(key), "expected an integer or a nonempty list");
    std::vector<int> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) throw ConfigError(field(key), "expected an integer or a nonempty list");
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::optional<Reader> child(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return Reader(*v, field(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<std::uint64_t> parse_seeds(const json& v) {
  if (v.is_string()) {
    try {
      return parse_seed_range(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("seeds", e.what());
    }
  }
  if (v.is_number_integer() && v.get<long long>() >= 0) return {v.get<std::uint64_t>()};
  if (!v.is_array() || v.empty()) throw ConfigError("seeds", "expected a nonempty list, an integer or \"N..M\"");
  std::vector<std::uint64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() < 0) {
      throw ConfigError("seeds", "seeds must be nonnegative integers");
    }
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Reader root(doc, "");

  const std::string scen = root.text("scenario", "estimate");
  const auto parsed = parse_scenario(scen);
  if (!parsed) {
    throw ConfigError("scenario", "unknown scenario '" + scen + "' (estimate, track, distributed, control, mac-sweep, kw)");
  }
  cfg.scenario = *parsed;

  if (auto t = root.child("topology")) {
    cfg.topology.file = t->text("file", "");
    cfg.topology.n = t->count("n", cfg.topology.n);
    cfg.topology.width = t->number("width", cfg.topology.width);
    cfg.topology.height = t->number("height", cfg.topology.height);
    cfg.topology.radius = t->opt_number("radius");
    if (const json* s = t->find("seed")) {
      if (!s->is_number_integer() || s->get<long long>() < 0) {
        throw ConfigError("topology.seed", "expected a nonnegative integer");
      }
      cfg.topology.seed = s->get<std::uint64_t>();
    }
    t->finish();
  }

  if (auto f = root.child("failure")) {
    cfg.p_c = f->numbers("p_c", cfg.p_c);
    const std::string mode = f->text("mode", "symmetric");
    if (mode == "symmetric") {
      cfg.symmetry = SymmetryMode::symmetric;
    } else if (mode == "asymmetric") {
      cfg.symmetry = SymmetryMode::asymmetric;
    } else {
      throw ConfigError("failure.mode", "expected \"symmetric\" or \"asymmetric\"");
    }
    f->finish();
  }

  if (auto s = root.child("schedule")) {
    const std::string mode = s->text("mode", "diminishing");
    if (mode == "diminishing") {
      cfg.mode = EstimatorMode::diminishing;
    } else if (mode == "adaptive") {
      cfg.mode = EstimatorMode::adaptive;
    } else {
      throw ConfigError("schedule.mode", "expected \"diminishing\" or \"adaptive\"");
    }
    cfg.schedule.eps0 = s->number("eps0", cfg.schedule.eps0);
    cfg.schedule.gamma = s->number("gamma", cfg.schedule.gamma);
    cfg.schedule.alpha0 = s->number("alpha0", cfg.schedule.alpha0);
    cfg.schedule.beta = s->number("beta", cfg.schedule.beta);
    cfg.schedule.eps_bar = s->number("eps_bar", cfg.schedule.eps_bar);
    s->finish();
  }

  if (auto r = root.child("run")) {
    cfg.iters = r->count("iters", cfg.iters);
    cfg.record_every = r->count("record_every", cfg.record_every);
    cfg.stop_on_convergence = r->flag("stop_on_convergence", cfg.stop_on_convergence);
    cfg.delta3 = r->number("delta3", cfg.delta3);
    cfg.sustain = r->count("sustain", cfg.sustain);
    cfg.timing = r->flag("timing", cfg.timing);
    r->finish();
  }

  if (const json* segs = root.find("segments")) {
    if (!segs->is_array()) throw ConfigError("segments", "expected a list of segments");
    for (std::size_t i = 0; i < segs->size(); ++i) {
      Reader seg((*segs)[i], "segments[" + std::to_string(i) + "]");
      SegmentParams sp;
      sp.length = seg.count("length", 0);
      sp.p_c = seg.number("p_c", 1.0);
      sp.radius = seg.opt_number("radius");
      seg.finish();
      cfg.segments.push_back(sp);
    }
  }

  if (auto c = root.child("consensus")) {
    cfg.consensus.eps_c = c->number("eps_c", cfg.consensus.eps_c);
    cfg.consensus.delta1 = c->number("delta1", cfg.consensus.delta1);
    cfg.consensus.delta2 = c->number("delta2", cfg.consensus.delta2);
    cfg.consensus.max_iters = c->count("max_iters", cfg.consensus.max_iters);
    cfg.consensus.scalar_cost = c->number("scalar_cost", cfg.consensus.scalar_cost);
    c->finish();
  }
  cfg.consensus.delta3 = cfg.delta3;

  if (auto r = root.child("radio")) {
    cfg.radio.p_th = r->number("p_th", cfg.radio.p_th);
    cfg.radio.xi = r->number("xi", cfg.radio.xi);
    cfg.radio.rho = r->number("rho", cfg.radio.rho);
    r->finish();
  }

  if (auto c = root.child("control")) {
    cfg.control.cfg.lambda_star = c->number("lambda_star", cfg.control.cfg.lambda_star);
    cfg.control.cfg.mu = c->number("mu", cfg.control.cfg.mu);
    cfg.control.cfg.p_min = c->number("p_min", cfg.control.cfg.p_min);
    cfg.control.cfg.p_max = c->number("p_max", cfg.control.cfg.p_max);
    cfg.control.p0 = c->number("p0", cfg.control.p0);
    const std::string link = c->text("link", "uniform");
    if (link == "uniform") {
      cfg.control.use_mac = false;
    } else if (link == "mac") {
      cfg.control.use_mac = true;
    } else {
      throw ConfigError("control.link", "expected \"uniform\" or \"mac\"");
    }
    cfg.control.m_channels = c->integer("m_channels", cfg.control.m_channels);
    cfg.control.distributed = c->flag("distributed", cfg.control.distributed);
    c->finish();
  }

  if (auto m = root.child("mac_sweep")) {
    cfg.mac_sweep.m_channels = m->integers("m_channels", cfg.mac_sweep.m_channels);
    cfg.mac_sweep.p_from = m->number("p_from", cfg.mac_sweep.p_from);
    cfg.mac_sweep.p_to = m->number("p_to", cfg.mac_sweep.p_to);
    cfg.mac_sweep.p_step = m->number("p_step", cfg.mac_sweep.p_step);
    m->finish();
  }

  if (auto k = root.child("kw")) {
    cfg.kw.kw.q0 = k->number("q0", cfg.kw.kw.q0);
    cfg.kw.kw.c0 = k->number("c0", cfg.kw.kw.c0);
    cfg.kw.kw.t_max = k->count("t_max", cfg.kw.kw.t_max);
    cfg.kw.kw.p_floor = k->number("p_floor", cfg.kw.kw.p_floor);
    cfg.kw.p0 = k->number("p0", cfg.kw.p0);
    cfg.kw.m_channels = k->integer("m_channels", cfg.kw.m_channels);
    cfg.kw.kw.measure.inner_iters = k->count("inner_iters", cfg.kw.kw.measure.inner_iters);
    cfg.kw.kw.measure.alpha = k->number("alpha", cfg.kw.kw.measure.alpha);
    cfg.kw.kw.measure.eps_scale = k->number("eps_scale", cfg.kw.kw.measure.eps_scale);
    k->finish();
  }

  if (const json* s = root.find("seeds")) cfg.seeds = parse_seeds(*s);
  cfg.out_dir = root.text("out", cfg.out_dir);
  root.finish();

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("--config", "cannot open " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

void validate_config(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  if (t.file.empty()) {
    require(t.n >= 2, "topology.n", "need at least two nodes");
    require(t.width > 0.0 && std::isfinite(t.width), "topology.width", "must be positive");
    require(t.height > 0.0 && std::isfinite(t.height), "topology.height", "must be positive");
    if (t.radius) require(*t.radius > 0.0, "topology.radius", "must be positive");
  }
  for (double p : cfg.p_c) require(p >= 0.0 && p <= 1.0, "failure.p_c", "probabilities must lie in [0, 1]");

  const auto& s = cfg.schedule;
  require(s.eps_bar > 0.0, "schedule.eps_bar", "must be positive");
  require(s.eps0 > 0.0, "schedule.eps0", "must be positive");
  require(s.alpha0 > 0.0, "schedule.alpha0", "must be positive");
  if (cfg.mode == EstimatorMode::diminishing) {
    require(s.eps0 <= 1.0, "schedule.eps0", "must not exceed 1 for the diminishing schedule");
    require(s.gamma > 0.5 && s.gamma <= 1.0, "schedule.gamma", "must lie in (0.5, 1] for the diminishing schedule");
    require(s.beta > 0.5 && s.beta <= 1.0, "schedule.beta", "must lie in (0.5, 1] for the diminishing schedule");
  } else {
    require(s.alpha0 <= 1.0, "schedule.alpha0", "adaptive mode uses alpha0 as a constant gain in (0, 1]");
  }

  require(cfg.record_every >= 1, "run.record_every", "must be at least 1");
  require(cfg.delta3 > 0.0, "run.delta3", "must be positive");
  require(cfg.sustain >= 1, "run.sustain", "must be at least 1");
  require(!cfg.seeds.empty(), "seeds", "need at least one seed");
  require(!cfg.out_dir.empty(), "out", "output directory must be set");

  const auto& c = cfg.consensus;
  require(c.eps_c > 0.0, "consensus.eps_c", "must be positive");
  require(c.delta1 > 0.0, "consensus.delta1", "must be positive");
  require(c.delta2 > 0.0, "consensus.delta2", "must be positive");
  require(c.max_iters >= 1, "consensus.max_iters", "must be at least 1");
  require(c.scalar_cost > 0.0, "consensus.scalar_cost", "must be positive");

  require(cfg.radio.p_th > 0.0, "radio.p_th", "must be positive");
  require(cfg.radio.xi > 0.0, "radio.xi", "must be positive");

  const bool graph_scenario =
      cfg.scenario == Scenario::estimate || cfg.scenario == Scenario::track || cfg.scenario == Scenario::distributed;
  if (graph_scenario) {
    require(!t.file.empty() || t.radius.has_value(), "topology.radius",
            "needed for generated graphs (or give topology.file)");
  }

  switch (cfg.scenario) {
    case Scenario::estimate:
    case Scenario::distributed:
      require(cfg.iters >= 1, "run.iters", "must be at least 1");
      if (cfg.scenario == Scenario::distributed) {
        require(cfg.symmetry == SymmetryMode::symmetric, "failure.mode",
                "distributed consensus needs symmetric failures");
      }
      break;
    case Scenario::track:
      require(!cfg.segments.empty(), "segments", "track scenario needs at least one segment");
      for (std::size_t i = 0; i < cfg.segments.size(); ++i) {
        const std::string f = "segments[" + std::to_string(i) + "]";
        require(cfg.segments[i].length >= 1, f + ".length", "must be at least 1");
        require(cfg.segments[i].p_c >= 0.0 && cfg.segments[i].p_c <= 1.0, f + ".p_c", "must lie in [0, 1]");
        if (cfg.segments[i].radius) {
          require(*cfg.segments[i].radius > 0.0, f + ".radius", "must be positive");
          require(t.file.empty(), f + ".radius", "radius changes need generated positions, not a topology file");
        }
      }
      break;
    case Scenario::control: {
      const auto& cc = cfg.control.cfg;
      require(cc.lambda_star > 0.0, "control.lambda_star", "must be positive");
      require(cc.mu >= 0.0, "control.mu", "must be nonnegative");
      require(cc.p_min > 0.0, "control.p_min", "must be positive");
      require(cc.p_max >= cc.p_min, "control.p_max", "must be at least p_min");
      require(cfg.control.p0 > 0.0, "control.p0", "must be positive");
      require(cfg.control.m_channels >= 2, "control.m_channels", "need at least two channels");
      require(t.file.empty() && !t.radius, "topology",
              "control needs generated positions without a fixed radius (the radius follows the power)");
      require(cfg.iters >= 1, "run.iters", "must be at least 1");
      if (cfg.control.distributed) {
        require(cfg.symmetry == SymmetryMode::symmetric, "failure.mode",
                "distributed consensus needs symmetric failures");
      }
      break;
    }
    case Scenario::mac_sweep:
      require(t.file.empty() && !t.radius, "topology", "mac-sweep needs generated positions without a fixed radius");
      for (int m : cfg.mac_sweep.m_channels) require(m >= 2, "mac_sweep.m_channels", "need at least two channels");
      require(cfg.mac_sweep.p_from > 0.0, "mac_sweep.p_from", "must be positive");
      require(cfg.mac_sweep.p_step > 0.0, "mac_sweep.p_step", "must be positive");
      require(cfg.mac_sweep.grid().size() >= 2, "mac_sweep.p_to", "the power grid needs at least two points");
      break;
    case Scenario::kw: {
      const auto& kw = cfg.kw.kw;
      require(t.file.empty() && !t.radius, "topology", "kw needs generated positions without a fixed radius");
      require(kw.q0 > 0.0, "kw.q0", "must be positive");
      require(kw.c0 > 0.0, "kw.c0", "must be positive");
      require(kw.t_max >= 1, "kw.t_max", "must be at least 1");
      require(kw.p_floor > 0.0, "kw.p_floor", "must be positive");
      require(cfg.kw.p0 > 0.0, "kw.p0", "must be positive");
      require(cfg.kw.m_channels >= 2, "kw.m_channels", "need at least two channels");
      require(kw.measure.inner_iters >= 1, "kw.inner_iters", "must be at least 1");
      require(kw.measure.alpha > 0.0 && kw.measure.alpha <= 1.0, "kw.alpha", "must lie in (0, 1]");
      require(kw.measure.eps_scale > 0.0 && kw.measure.eps_scale <= 1.0, "kw.eps_scale", "must lie in (0, 1]");
      break;
    }
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["scenario"] = to_string(cfg.scenario);
  json topo;
  topo["file"] = cfg.topology.file;
  topo["n"] = cfg.topology.n;
  topo["width"] = cfg.topology.width;
  topo["height"] = cfg.topology.height;
  topo["radius"] = cfg.topology.radius ? json(*cfg.topology.radius) : json(nullptr);
  topo["seed"] = cfg.topology.seed ? json(*cfg.topology.seed) : json(nullptr);
  doc["topology"] = topo;
  doc["failure"] = {{"p_c", cfg.p_c}, {"mode", cfg.symmetry == SymmetryMode::symmetric ? "symmetric" : "asymmetric"}};
  doc["schedule"] = {{"mode", cfg.mode == EstimatorMode::adaptive ? "adaptive" : "diminishing"},
                     {"eps0", cfg.schedule.eps0},
                     {"gamma", cfg.schedule.gamma},
                     {"alpha0", cfg.schedule.alpha0},
                     {"beta", cfg.schedule.beta},
                     {"eps_bar", cfg.schedule.eps_bar}};
  doc["run"] = {{"iters", cfg.iters},   {"record_every", cfg.record_every},
                {"stop_on_convergence", cfg.stop_on_convergence},
                {"delta3", cfg.delta3}, {"sustain", cfg.sustain},
                {"timing", cfg.timing}};
  json segs = json::array();
  for (const auto& s : cfg.segments) {
    segs.push_back({{"length", s.length}, {"p_c", s.p_c}, {"radius", s.radius ? json(*s.radius) : json(nullptr)}});
  }
  doc["segments"] = segs;
  doc["consensus"] = {{"eps_c", cfg.consensus.eps_c},
                      {"delta1", cfg.consensus.delta1},
                      {"delta2", cfg.consensus.delta2},
                      {"max_iters", cfg.consensus.max_iters},
                      {"scalar_cost", cfg.consensus.scalar_cost}};
  doc["radio"] = {{"p_th", cfg.radio.p_th}, {"xi", cfg.radio.xi}, {"rho", cfg.radio.rho}};
  doc["control"] = {{"lambda_star", cfg.control.cfg.lambda_star},
                    {"mu", cfg.control.cfg.mu},
                    {"p_min", cfg.control.cfg.p_min},
                    {"p_max", cfg.control.cfg.p_max},
                    {"p0", cfg.control.p0},
                    {"link", cfg.control.use_mac ? "mac" : "uniform"},
                    {"m_channels", cfg.control.m_channels},
                    {"distributed", cfg.control.distributed}};
  doc["mac_sweep"] = {{"m_channels", cfg.mac_sweep.m_channels},
                      {"p_from", cfg.mac_sweep.p_from},
                      {"p_to", cfg.mac_sweep.p_to},
                      {"p_step", cfg.mac_sweep.p_step}};
  doc["kw"] = {{"q0", cfg.kw.kw.q0},
               {"c0", cfg.kw.kw.c0},
               {"t_max", cfg.kw.kw.t_max},
               {"p_floor", cfg.kw.kw.p_floor},
               {"p0", cfg.kw.p0},
               {"m_channels", cfg.kw.m_channels},
               {"inner_iters", cfg.kw.kw.measure.inner_iters},
               {"alpha", cfg.kw.kw.measure.alpha},
               {"eps_scale", cfg.kw.kw.measure.eps_scale}};
  doc["seeds"] = cfg.seeds;
  doc["out"] = cfg.out_dir;
  return doc;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json doc = config_to_json(cfg);
  // Seeds and output location do not change what a single run computes.
  doc.erase("seeds");
  doc.erase("out");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError("--set", "empty path component in '" + key + "'");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) throw ConfigError(key, "cannot descend into a non-object");
    node = &(*node)[path[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError(key, "cannot descend into a non-object");
  (*node)[path.back()] = value;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto parse_one = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad seed '" + std::string(s) + "' in '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_one(text)};
  const std::uint64_t lo = parse_one(std::string_view(text).substr(0, dots));
  const std::uint64_t hi = parse_one(std::string_view(text).substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("seed range '" + text + "' is empty");
  if (hi - lo >= 1000000) throw std::invalid_argument("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  return out;
}

}  // namespace algcon
