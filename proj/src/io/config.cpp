#include "qfc/io/config.hpp"

#include <set>

#include "json_util.hpp"
#include "qfc/core/units.hpp"
#include "qfc/io/csv.hpp"

namespace qfc::io {

using detail::json;

FrequencyGrid GridConfig::to_grid(const std::string& label) const {
  return FrequencyGrid::from_wavelength(center_nm, units::hz_to_omega(spacing_hz), count, label);
}

NoiseSpec ExperimentConfig::noise_spec() const {
  NoiseSpec n;
  n.seed = seed;
  if (noise.profile == "experiment-like") {
    n.additive_sigma = kExperimentAdditiveSigma;
    n.multiplicative_sigma = kExperimentMultiplicativeSigma;
  } else if (noise.profile == "custom") {
    n.additive_sigma = noise.additive_sigma;
    n.multiplicative_sigma = noise.multiplicative_sigma;
  }
  return n;
}

namespace {

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Node {
 public:
  Node(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
    if (!j_.is_object()) throw ConfigError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  std::string at(const std::string& key) const { return ptr_ + "/" + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return fallback;
    return convert<T>(*it, at(key));
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(at(key), "required field is missing");
    return convert<T>(*it, at(key));
  }

  std::optional<Node> child(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Node(*it, at(key));
  }

  Node need(const std::string& key) {
    auto n = child(key);
    if (!n) throw ConfigError(at(key), "required field is missing");
    return *n;
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
  }

 private:
  template <class T>
  static T convert(const json& v, const std::string& ptr) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(ptr, "expected a number");
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(ptr, "expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(ptr, "expected a string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(ptr, "expected true or false");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(ptr, "wrong type");
    }
  }

  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

void require_that(bool ok, const std::string& ptr, const std::string& what) {
  if (!ok) throw ConfigError(ptr, what);
}

double positive(Node& n, const std::string& key, double fallback) {
  const double v = n.get(key, fallback);
  require_that(v > 0.0, n.at(key), "must be positive");
  return v;
}

double non_negative(Node& n, const std::string& key, double fallback) {
  const double v = n.get(key, fallback);
  require_that(v >= 0.0, n.at(key), "must not be negative");
  return v;
}

DispersionSpec read_dispersion(std::optional<Node> n) {
  DispersionSpec d;
  if (!n) return d;
  d.reference_wavelength_nm = positive(*n, "reference_wavelength", d.reference_wavelength_nm);
  d.group_delay_per_length = n->get("group_delay_per_length", 0.0);
  d.dispersion_d = n->get("dispersion_parameter_D", 0.0);
  d.dispersion_slope = n->get("dispersion_slope", 0.0);
  d.length_km = non_negative(*n, "length", 0.0);
  n->finish();
  return d;
}

json dispersion_json(const DispersionSpec& d) {
  return {{"reference_wavelength", d.reference_wavelength_nm},
          {"group_delay_per_length", d.group_delay_per_length},
          {"dispersion_parameter_D", d.dispersion_d},
          {"dispersion_slope", d.dispersion_slope},
          {"length", d.length_km}};
}

PumpEnvelope read_pump(Node n) {
  PumpEnvelope p;
  p.center_wavelength_nm = positive(n, "center_wavelength", 0.0);
  p.duration_fwhm_ps = positive(n, "duration_fwhm", 0.0);
  p.chirp = n.get("chirp", 0.0);
  p.peak_amplitude = non_negative(n, "peak_amplitude", 1.0);
  p.delay_ps = n.get("delay", 0.0);
  n.finish();
  return p;
}

json pump_json(const PumpEnvelope& p) {
  return {{"center_wavelength", p.center_wavelength_nm},
          {"duration_fwhm", p.duration_fwhm_ps},
          {"chirp", p.chirp},
          {"peak_amplitude", p.peak_amplitude},
          {"delay", p.delay_ps}};
}

GridConfig read_grid(Node n) {
  GridConfig g;
  g.center_nm = positive(n, "center_wavelength", 0.0);
  g.spacing_hz = positive(n, "spacing_hz", 0.0);
  g.count = n.require<std::size_t>("count");
  require_that(g.count >= 2, n.at("count"), "a grid needs at least two points");
  n.finish();
  return g;
}

json grid_json(const GridConfig& g) {
  return {{"center_wavelength", g.center_nm}, {"spacing_hz", g.spacing_hz}, {"count", g.count}};
}

BsfwmSpec read_active(Node n) {
  BsfwmSpec s;
  s.pump_p = read_pump(n.need("pump_p"));
  s.pump_q = read_pump(n.need("pump_q"));
  s.shift = n.get("shift", 0.0);
  s.coupling = non_negative(n, "coupling", 0.0);
  s.active_length_m = non_negative(n, "active_length", 0.0);
  if (auto bd = n.child("band_dispersion")) {
    s.band_dispersion_in = read_dispersion(bd->child("in"));
    s.band_dispersion_out = read_dispersion(bd->child("out"));
    bd->finish();
  }
  if (auto w = n.child("walkoff")) {
    s.walkoff_in = w->get("in", 0.0);
    s.walkoff_out = w->get("out", 0.0);
    w->finish();
  }
  if (const json* prof = n.raw("coupling_profile")) {
    require_that(prof->is_array(), n.at("coupling_profile"), "expected an array of numbers");
    for (std::size_t i = 0; i < prof->size(); ++i) {
      const auto& v = (*prof)[i];
      const std::string ptr = n.at("coupling_profile") + "/" + std::to_string(i);
      require_that(v.is_number(), ptr, "expected a number");
      require_that(v.get<double>() >= 0.0, ptr, "must not be negative");
      s.coupling_profile.push_back(v.get<double>());
    }
    require_that(s.coupling_profile.empty() || s.coupling_profile.size() >= 2, n.at("coupling_profile"),
                 "needs at least two nodes");
  }
  n.finish();
  return s;
}

SimModel parse_model(const std::string& s, const std::string& ptr) {
  if (s == "closed_form") return SimModel::kClosedForm;
  if (s == "born") return SimModel::kBorn;
  if (s == "split_step") return SimModel::kSplitStep;
  throw ConfigError(ptr, "unknown model '" + s + "' (closed_form, born, split_step)");
}

const char* model_name(SimModel m) {
  switch (m) {
    case SimModel::kClosedForm: return "closed_form";
    case SimModel::kBorn: return "born";
    case SimModel::kSplitStep: return "split_step";
  }
  return "closed_form";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Node root(j, "");
  const auto schema = root.require<std::string>("schema");
  require_that(schema == kConfigSchema, "/schema", std::string("expected ") + kConfigSchema);
  c.name = root.get<std::string>("name", "");
  c.seed = root.get<std::uint64_t>("seed", 1);

  auto grids = root.child("grids");
  require_that(grids.has_value(), "/grids", "required field is missing");
  c.in_grid = read_grid(grids->need("in"));
  c.out_grid = read_grid(grids->need("out"));
  grids->finish();

  auto chain = root.child("chain");
  require_that(chain.has_value(), "/chain", "required field is missing");
  c.chain.pre = read_dispersion(chain->child("pre"));
  c.chain.post = read_dispersion(chain->child("post"));
  c.chain.active = read_active(chain->need("active"));
  chain->finish();

  const auto in = c.in_grid.to_grid("in");
  const auto out = c.out_grid.to_grid("out");
  if (c.chain.active.shift == 0.0) {
    c.chain.active.shift = out.center() - in.center();
  } else {
    require_that(out.contains(in.center() + c.chain.active.shift), "/chain/active/shift",
                 "maps the input center outside the output grid");
  }

  if (auto s = root.child("simulation")) {
    c.simulation.model = parse_model(s->get<std::string>("model", "closed_form"), s->at("model"));
    c.simulation.dz_m = non_negative(*s, "dz_m", 0.0);
    c.simulation.product_gdd_ps2 = s->get("product_gdd_ps2", 0.0);
    s->finish();
  }

  if (auto p = root.child("probe")) {
    auto& q = c.probe;
    q.center_start_nm = positive(*p, "center_start_nm", q.center_start_nm);
    q.center_stop_nm = positive(*p, "center_stop_nm", q.center_stop_nm);
    q.center_count = p->get<std::size_t>("center_count", q.center_count);
    q.shear_hz = positive(*p, "shear_hz", q.shear_hz);
    q.delay_start_ps = p->get("delay_start_ps", q.delay_start_ps);
    q.delay_stop_ps = p->get("delay_stop_ps", q.delay_stop_ps);
    q.delay_step_ps = positive(*p, "delay_step_ps", q.delay_step_ps);
    q.amplitude = positive(*p, "amplitude", q.amplitude);
    require_that(q.center_count >= 1, p->at("center_count"), "must be at least 1");
    require_that(q.center_stop_nm >= q.center_start_nm, p->at("center_stop_nm"), "must not be below center_start_nm");
    require_that(q.delay_stop_ps > q.delay_start_ps, p->at("delay_stop_ps"), "must exceed delay_start_ps");
    p->finish();
  }

  if (auto d = root.child("detector")) {
    c.detector.osa_fwhm_nm = non_negative(*d, "osa_fwhm_nm", c.detector.osa_fwhm_nm);
    c.detector.averages = d->get<std::size_t>("averages", c.detector.averages);
    require_that(c.detector.averages >= 1, d->at("averages"), "must be at least 1");
    d->finish();
  }

  if (auto n = root.child("noise")) {
    c.noise.profile = n->get<std::string>("profile", "none");
    require_that(c.noise.profile == "none" || c.noise.profile == "experiment-like" || c.noise.profile == "custom",
                 n->at("profile"), "must be none, experiment-like or custom");
    const bool custom = c.noise.profile == "custom";
    for (const char* key : {"additive_sigma", "multiplicative_sigma"})
      require_that(custom || !n->has(key), n->at(key), "explicit sigmas need profile \"custom\"");
    c.noise.additive_sigma = non_negative(*n, "additive_sigma", 0.0);
    c.noise.multiplicative_sigma = non_negative(*n, "multiplicative_sigma", 0.0);
    n->finish();
  }

  if (auto r = root.child("recon")) {
    auto& o = c.recon;
    o.phase.threshold = non_negative(*r, "threshold", o.phase.threshold);
    require_that(o.phase.threshold < 1.0, r->at("threshold"), "must be below 1");
    o.phase.global_floor = non_negative(*r, "global_floor", o.phase.global_floor);
    o.resample_factor = r->get<std::size_t>("resample_factor", o.resample_factor);
    require_that(o.resample_factor >= 1, r->at("resample_factor"), "must be at least 1");
    const auto mag = r->get<std::string>("magnitude", "dc_half");
    require_that(mag == "dc_half" || mag == "quadratic_split", r->at("magnitude"), "must be dc_half or quadratic_split");
    o.magnitude = mag == "dc_half" ? MagnitudeMode::kDcHalf : MagnitudeMode::kQuadraticSplit;
    if (const json* ivs = r->raw("mask_intervals")) {
      require_that(ivs->is_array(), r->at("mask_intervals"), "expected an array");
      for (std::size_t i = 0; i < ivs->size(); ++i) {
        Node iv((*ivs)[i], r->at("mask_intervals") + "/" + std::to_string(i));
        MaskInterval m;
        m.lo_nm = iv.require<double>("lo_nm");
        m.hi_nm = iv.require<double>("hi_nm");
        require_that(m.hi_nm > m.lo_nm, iv.at("hi_nm"), "must exceed lo_nm");
        const auto axis = iv.get<std::string>("axis", "out");
        require_that(axis == "out" || axis == "in", iv.at("axis"), "must be in or out");
        m.axis = axis == "out" ? MaskAxis::kOut : MaskAxis::kIn;
        iv.finish();
        o.phase.mask_intervals.push_back(m);
      }
    }
    r->finish();
  }

  if (auto t = root.child("tolerances")) {
    auto& o = c.tolerances;
    if (t->has("slope_expected_ps_per_nm")) o.slope_expected_ps_per_nm = t->get("slope_expected_ps_per_nm", 0.0);
    o.slope_tolerance_ps_per_nm = non_negative(*t, "slope_tolerance_ps_per_nm", 0.0);
    if (t->has("phase_rmse_max_rad")) o.phase_rmse_max_rad = positive(*t, "phase_rmse_max_rad", 1.0);
    if (t->has("sigma_tau_expected_ps")) o.sigma_tau_expected_ps = positive(*t, "sigma_tau_expected_ps", 1.0);
    o.sigma_tau_factor = positive(*t, "sigma_tau_factor", o.sigma_tau_factor);
    require_that(o.sigma_tau_factor >= 1.0, t->at("sigma_tau_factor"), "must be at least 1");
    t->finish();
  }
  root.finish();

  // Probe tones must land inside the input grid.
  const double half_shear = units::hz_to_omega(c.probe.shear_hz) / 2;
  for (double nm : {c.probe.center_start_nm, c.probe.center_stop_nm}) {
    const double w = units::wavelength_nm_to_omega(nm);
    require_that(in.contains(w - half_shear) && in.contains(w + half_shear), "/probe",
                 "probe tones fall outside the input grid");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ParseError&) {
    throw ConfigError("", "cannot open config " + path.string());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  const auto& a = c.chain.active;
  json active{{"pump_p", pump_json(a.pump_p)},
              {"pump_q", pump_json(a.pump_q)},
              {"shift", a.shift},
              {"coupling", a.coupling},
              {"active_length", a.active_length_m},
              {"band_dispersion", {{"in", dispersion_json(a.band_dispersion_in)}, {"out", dispersion_json(a.band_dispersion_out)}}},
              {"walkoff", {{"in", a.walkoff_in}, {"out", a.walkoff_out}}}};
  if (!a.coupling_profile.empty()) active["coupling_profile"] = a.coupling_profile;
  json intervals = json::array();
  for (const auto& m : c.recon.phase.mask_intervals)
    intervals.push_back({{"lo_nm", m.lo_nm}, {"hi_nm", m.hi_nm}, {"axis", m.axis == MaskAxis::kOut ? "out" : "in"}});
  json noise{{"profile", c.noise.profile}};
  if (c.noise.profile == "custom") {
    noise["additive_sigma"] = c.noise.additive_sigma;
    noise["multiplicative_sigma"] = c.noise.multiplicative_sigma;
  }
  json tol{{"slope_tolerance_ps_per_nm", c.tolerances.slope_tolerance_ps_per_nm},
           {"sigma_tau_factor", c.tolerances.sigma_tau_factor}};
  if (c.tolerances.slope_expected_ps_per_nm) tol["slope_expected_ps_per_nm"] = *c.tolerances.slope_expected_ps_per_nm;
  if (c.tolerances.phase_rmse_max_rad) tol["phase_rmse_max_rad"] = *c.tolerances.phase_rmse_max_rad;
  if (c.tolerances.sigma_tau_expected_ps) tol["sigma_tau_expected_ps"] = *c.tolerances.sigma_tau_expected_ps;
  const auto& p = c.probe;
  return {{"schema", kConfigSchema},
          {"name", c.name},
          {"seed", c.seed},
          {"grids", {{"in", grid_json(c.in_grid)}, {"out", grid_json(c.out_grid)}}},
          {"chain", {{"pre", dispersion_json(c.chain.pre)}, {"active", active}, {"post", dispersion_json(c.chain.post)}}},
          {"simulation",
           {{"model", model_name(c.simulation.model)},
            {"dz_m", c.simulation.dz_m},
            {"product_gdd_ps2", c.simulation.product_gdd_ps2}}},
          {"probe",
           {{"center_start_nm", p.center_start_nm},
            {"center_stop_nm", p.center_stop_nm},
            {"center_count", p.center_count},
            {"shear_hz", p.shear_hz},
            {"delay_start_ps", p.delay_start_ps},
            {"delay_stop_ps", p.delay_stop_ps},
            {"delay_step_ps", p.delay_step_ps},
            {"amplitude", p.amplitude}}},
          {"detector", {{"osa_fwhm_nm", c.detector.osa_fwhm_nm}, {"averages", c.detector.averages}}},
          {"noise", noise},
          {"recon",
           {{"threshold", c.recon.phase.threshold},
            {"global_floor", c.recon.phase.global_floor},
            {"resample_factor", c.recon.resample_factor},
            {"magnitude", c.recon.magnitude == MagnitudeMode::kDcHalf ? "dc_half" : "quadratic_split"},
            {"mask_intervals", intervals}}},
          {"tolerances", tol}};
}

}  // namespace qfc::io
