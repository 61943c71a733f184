#include "softcover_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <system_error>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "softcover/codebook.hpp"
#include "softcover/errors.hpp"
#include "softcover/exponents.hpp"
#include "softcover/gaussian_demo.hpp"
#include "softcover/info_measures.hpp"
#include "softcover/montecarlo.hpp"

namespace softcover::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Error bad_input(const std::string& msg) { return Error(Errc::InvalidArgument, msg); }

// ---------------------------------------------------------------------------
// number parsing and formatting

template <class T>
T parse_number(std::string_view text, const std::string& what) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw bad_input("cannot parse " + what + " from '" + std::string(text) + "'");
  }
  return value;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json number_or_null(const std::optional<double>& x) {
  return x ? number_or_null(*x) : json(nullptr);
}

// ---------------------------------------------------------------------------
// typed access to the merged parameter object

class Params {
 public:
  Params(json obj, std::set<std::string> allowed) : obj_(std::move(obj)), allowed_(std::move(allowed)) {
    if (!obj_.is_object()) throw bad_input("config must be a JSON object");
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed_.count(key)) throw bad_input("unknown config key '" + key + "'");
    }
  }

  json& raw() { return obj_; }
  bool has(const std::string& key) const { return obj_.contains(key) && !obj_[key].is_null(); }
  const json& at(const std::string& key) const { return obj_.at(key); }

  std::optional<double> number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!obj_[key].is_number()) throw bad_input("'" + key + "' must be a number");
    return obj_[key].get<double>();
  }

  std::optional<long long> integer(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!obj_[key].is_number_integer()) throw bad_input("'" + key + "' must be an integer");
    return obj_[key].get<long long>();
  }

  std::optional<std::uint64_t> unsigned64(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_[key];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw bad_input("'" + key + "' must be a non-negative integer");
  }

  std::optional<bool> boolean(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!obj_[key].is_boolean()) throw bad_input("'" + key + "' must be true or false");
    return obj_[key].get<bool>();
  }

  std::optional<std::string> string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!obj_[key].is_string()) throw bad_input("'" + key + "' must be a string");
    return obj_[key].get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    if (!obj_[key].is_array()) throw bad_input("'" + key + "' must be an array of numbers");
    for (const auto& v : obj_[key]) {
      if (!v.is_number()) throw bad_input("'" + key + "' must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    if (!obj_[key].is_array()) throw bad_input("'" + key + "' must be an array of integers");
    for (const auto& v : obj_[key]) {
      if (!v.is_number_integer()) throw bad_input("'" + key + "' must be an array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  }

  template <class T>
  T require(std::optional<T> v, const std::string& key) const {
    if (!v) throw bad_input("missing required parameter '" + key + "'");
    return *v;
  }

 private:
  json obj_;
  std::set<std::string> allowed_;
};

// ---------------------------------------------------------------------------
// channel specs

std::vector<double> probability_row(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw bad_input(what + " must be a nonempty array of numbers");
  std::vector<double> row;
  for (const auto& x : v) {
    if (!x.is_number()) throw bad_input(what + " must be a nonempty array of numbers");
    row.push_back(x.get<double>());
  }
  return row;
}

ChannelSpec channel_from_json(const json& obj, std::string label) {
  if (!obj.is_object()) throw bad_input("channel spec must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (key != "input_dist" && key != "channel_rows") {
      throw bad_input("unknown channel spec key '" + key + "'");
    }
  }
  if (!obj.contains("channel_rows") || !obj["channel_rows"].is_array() ||
      obj["channel_rows"].empty()) {
    throw bad_input("channel spec needs a nonempty 'channel_rows' array");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& r : obj["channel_rows"]) rows.push_back(probability_row(r, "channel row"));
  Channel ch(std::move(rows));
  FiniteDistribution qx = obj.contains("input_dist")
                              ? FiniteDistribution(probability_row(obj["input_dist"], "input_dist"))
                              : FiniteDistribution::uniform(ch.input_size());
  if (qx.size() != ch.input_size()) {
    throw Error(Errc::AlphabetMismatch, "input_dist length does not match the channel input alphabet");
  }
  return {std::move(qx), std::move(ch), std::move(label)};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bad_input("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw bad_input("invalid JSON in '" + path + "': " + e.what());
  }
}

ChannelSpec channel_from_value(const json& v) {
  if (v.is_string()) return parse_channel_spec(v.get<std::string>());
  if (v.is_object()) return channel_from_json(v, "custom");
  throw bad_input("'channel' must be a string or an object");
}

// ---------------------------------------------------------------------------
// output helpers

json common_notes() {
  return json::array({
      "mu_n is evaluated as Q(Qinv(eps) + (r / sqrt V) log2(n) / sqrt(n)) + rho / (V^1.5 sqrt n); "
      "the nested Q(Q(eps)) form is read as a misprint for the inverse.",
      "failure probabilities are reported as natural logarithms; a bound whose log is >= 0 "
      "exceeds 1, is flagged vacuous, and places no constraint on the empirical tail.",
  });
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << contents;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw std::runtime_error("cannot create output directory '" + dir + "'");
  return p;
}

json distribution_json(const FiniteDistribution& d) {
  json a = json::array();
  for (double p : d.probs()) a.push_back(p);
  return a;
}

// ---------------------------------------------------------------------------
// CLI11 plumbing: every flag writes into the parameter object under its config key

class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  void option(const std::string& flags, const std::string& key, const std::string& help) {
    auto store = std::make_shared<T>();
    auto* opt = app_->add_option(flags, *store, help);
    apply_.push_back([opt, store, key](json& obj) {
      if (opt->count() > 0) obj[key] = *store;
    });
  }

  void flag(const std::string& flags, const std::string& key, const std::string& help) {
    auto store = std::make_shared<bool>(false);
    auto* opt = app_->add_flag(flags, *store, help);
    apply_.push_back([opt, store, key](json& obj) {
      if (opt->count() > 0) obj[key] = *store;
    });
  }

  /// Comma-separated list, or lo..hi for an inclusive integer range.
  void int_list(const std::string& flags, const std::string& key, const std::string& help) {
    auto store = std::make_shared<std::string>();
    auto* opt = app_->add_option(flags, *store, help);
    apply_.push_back([opt, store, key](json& obj) {
      if (opt->count() == 0) return;
      json arr = json::array();
      const std::string& s = *store;
      if (const auto dots = s.find(".."); dots != std::string::npos) {
        const int lo = parse_number<int>(std::string_view(s).substr(0, dots), key);
        const int hi = parse_number<int>(std::string_view(s).substr(dots + 2), key);
        if (hi < lo) throw bad_input("empty range for '" + key + "'");
        for (int n = lo; n <= hi; ++n) arr.push_back(n);
      } else {
        std::stringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ',');) arr.push_back(parse_number<int>(tok, key));
      }
      obj[key] = arr;
    });
  }

  void double_list(const std::string& flags, const std::string& key, const std::string& help) {
    auto store = std::make_shared<std::string>();
    auto* opt = app_->add_option(flags, *store, help);
    apply_.push_back([opt, store, key](json& obj) {
      if (opt->count() == 0) return;
      json arr = json::array();
      std::stringstream ss(*store);
      for (std::string tok; std::getline(ss, tok, ',');) arr.push_back(parse_number<double>(tok, key));
      obj[key] = arr;
    });
  }

  void apply(json& obj) const {
    for (const auto& f : apply_) f(obj);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(json&)>> apply_;
};

struct Subcommand {
  CLI::App* app = nullptr;
  std::unique_ptr<Binder> binder;
  std::set<std::string> keys;
  std::string config_path;
  long long threads_flag = 0;
  CLI::Option* threads_opt = nullptr;

  std::optional<long long> threads() const {
    return threads_opt && threads_opt->count() > 0 ? std::optional<long long>(threads_flag) : std::nullopt;
  }
};

void add_common(Subcommand& sc, bool with_out, bool with_threads) {
  sc.app->add_option("--config", sc.config_path, "JSON file with parameters; flags take precedence");
  sc.binder->option<std::string>("--channel", "channel", "bsc:p, bec:p, noiseless:k, inline JSON or a file");
  sc.binder->double_list("--input-dist", "input_dist", "comma-separated input distribution");
  sc.binder->option<std::uint64_t>("--seed", "seed", "master seed");
  sc.keys.insert({"channel", "input_dist", "seed"});
  if (with_out) {
    sc.binder->option<std::string>("--out", "out", "output directory");
    sc.keys.insert("out");
  }
  if (with_threads) {
    sc.threads_opt = sc.app->add_option("--threads", sc.threads_flag, "worker threads (default: all cores)");
    sc.keys.insert("threads");
  }
}

Params merged_params(const Subcommand& sc) {
  json obj = sc.config_path.empty() ? json::object() : read_json_file(sc.config_path);
  if (!obj.is_object()) throw bad_input("config must be a JSON object");
  // Reject unknown config keys before flags are layered on top.
  Params checked(obj, sc.keys);
  sc.binder->apply(checked.raw());
  return checked;
}

ChannelSpec channel_of(const Params& p) {
  if (!p.has("channel")) throw bad_input("missing required parameter 'channel'");
  auto spec = channel_from_value(p.at("channel"));
  if (p.has("input_dist")) {
    FiniteDistribution qx(p.numbers("input_dist"));
    if (qx.size() != spec.ch.input_size()) {
      throw Error(Errc::AlphabetMismatch, "input_dist length does not match the channel input alphabet");
    }
    spec.qx = std::move(qx);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// exponent

int cmd_exponent(const Params& p, std::ostream& out) {
  const auto spec = channel_of(p);
  const double rate = p.require(p.number("rate"), "rate");
  const double delta = p.require(p.number("delta"), "delta");
  const auto n = p.integer("n");

  json j;
  j["channel"] = spec.label;
  j["input_dist"] = distribution_json(spec.qx);
  if (n) {
    if (*n < 1) throw bad_input("n must be positive");
    const auto b = theorem1_bound(spec.qx, spec.ch, rate, delta, static_cast<int>(*n));
    const auto& e = b.exponent;
    j["mutual_info"] = e.mutual_info;
    j["rate"] = rate;
    j["delta"] = delta;
    j["gamma_delta"] = e.gamma_delta;
    j["alpha_star"] = e.alpha_at_boundary ? json("boundary") : json(e.alpha_star);
    j["epsilon_star"] = e.epsilon_star;
    j["beta"] = e.beta;
    j["n"] = *n;
    j["tv_threshold"] = number_or_null(b.tv_threshold);
    j["failure_prob_log"] = number_or_null(b.failure_prob_log);
    j["vacuous"] = b.vacuous;
  } else {
    const auto e = gamma_delta(spec.qx, spec.ch, rate, delta);
    j["mutual_info"] = e.mutual_info;
    j["rate"] = rate;
    j["delta"] = delta;
    j["gamma_delta"] = e.gamma_delta;
    j["alpha_star"] = e.alpha_at_boundary ? json("boundary") : json(e.alpha_star);
    j["epsilon_star"] = e.epsilon_star;
    j["beta"] = e.beta;
    j["n"] = nullptr;
    j["tv_threshold"] = nullptr;
    j["failure_prob_log"] = nullptr;
    j["vacuous"] = nullptr;
  }
  j["paper_notes"] = common_notes();
  out << j.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// second-order

int cmd_second_order(const Params& p, std::ostream& out) {
  const auto spec = channel_of(p);
  const double eps = p.require(p.number("epsilon"), "epsilon");
  const long long n = p.require(p.integer("n"), "n");
  const double c = p.number("c").value_or(3.0);
  const double d = p.number("d").value_or(1.0);
  const double r = p.number("r").value_or(0.5);
  if (n < 2 || n > std::numeric_limits<int>::max()) throw bad_input("n must be at least 2");

  const auto profile = info_profile(spec.qx, spec.ch);
  const auto plan = second_order_plan(profile, spec.ch.output_size(), eps, static_cast<int>(n), c, d, r);

  json j;
  j["channel"] = spec.label;
  j["input_dist"] = distribution_json(spec.qx);
  j["mutual_info"] = profile.mutual_info_bits;
  j["dispersion"] = profile.dispersion;
  j["third_abs_moment"] = profile.third_abs_moment;
  j["epsilon_target"] = plan.epsilon_target;
  j["c"] = plan.c;
  j["d"] = plan.d;
  j["r"] = plan.r;
  j["n"] = plan.n;
  j["rate"] = plan.rate;
  j["rate_minus_mutual_info"] = plan.rate - profile.mutual_info_bits;
  j["slack"] = plan.slack;
  j["mu_n"] = plan.mu_n;
  j["tv_bound"] = plan.tv_bound;
  j["failure_log"] = number_or_null(plan.failure_log);
  j["target_failure_log"] = number_or_null(plan.target_failure_log);
  j["vacuous"] = plan.vacuous;
  j["paper_notes"] = common_notes();
  out << j.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

ReportPath report_path_of(const std::string& s) {
  if (s == "auto") return ReportPath::Auto;
  if (s == "generic") return ReportPath::Generic;
  if (s == "bsc") return ReportPath::BinarySymmetric;
  throw bad_input("path must be one of auto, generic, bsc");
}

json tail_json(const TailEstimate& t) {
  return json{{"threshold", t.threshold}, {"p_hat", t.p_hat}, {"stderr", t.stderr_}};
}

int cmd_simulate(const Params& p, std::optional<long long> threads_flag, std::ostream& out,
                 std::ostream& err) {
  auto spec = channel_of(p);
  TrialConfig cfg(spec.qx, spec.ch);
  cfg.n_list = p.integers("n_list");
  if (cfg.n_list.empty()) throw bad_input("missing required parameter 'n_list'");
  cfg.trials = static_cast<int>(p.integer("trials").value_or(100));
  cfg.master_seed = p.unsigned64("seed").value_or(0);
  cfg.delta = p.number("delta").value_or(0.05);
  cfg.epsilon_override = p.number("epsilon");
  cfg.thresholds = p.numbers("thresholds");
  cfg.path = report_path_of(p.string("path").value_or("auto"));
  if (auto v = p.unsigned64("max_codewords")) cfg.caps.max_codewords = *v;
  if (auto v = p.unsigned64("max_space")) cfg.caps.max_space = *v;
  cfg.threads = resolve_threads(threads_flag, p.integer("threads"));

  const std::string mode = p.string("rate_mode").value_or(p.has("rate") ? "fixed" : "second_order");
  if (mode == "fixed") {
    cfg.rate = FixedRate{p.require(p.number("rate"), "rate")};
  } else if (mode == "second_order") {
    SecondOrderRate so;
    so.eps_target = p.number("epsilon_target").value_or(so.eps_target);
    so.c = p.number("c").value_or(so.c);
    so.d = p.number("d").value_or(so.d);
    so.r = p.number("r").value_or(so.r);
    cfg.rate = so;
  } else {
    throw bad_input("rate_mode must be 'fixed' or 'second_order'");
  }
  if (cfg.trials < 1) throw bad_input("trials must be at least 1");

  // Plan every blocklength first so cap violations surface before any output.
  for (int n : cfg.n_list) {
    try {
      (void)plan_blocklength(cfg, n);
    } catch (const Error& e) {
      if (!is_resource_cap(e.code())) throw;
      err << "error: resource cap exceeded at n=" << n << ": " << e.what() << '\n';
      return kResourceCap;
    }
  }

  const auto dir = prepare_out_dir(p.string("out").value_or("."));
  const auto sweep = run_sweep(cfg);

  std::string csv = "n,trial,seed,tv,p2_mass,d1_max,pos_part_d1\n";
  for (const auto& bl : sweep.per_n) {
    for (const auto& rec : bl.records) {
      const auto& r = rec.report;
      csv += std::to_string(rec.n) + ',' + std::to_string(rec.trial) + ',' + std::to_string(rec.seed) + ',' +
             format_double(r.tv) + ',' + format_double(r.p2_mass) + ',' + format_double(r.d1_max) + ',' +
             format_double(r.pos_part_d1) + '\n';
    }
  }
  write_file(dir / "sweep.csv", csv);

  json s;
  s["channel"] = spec.label;
  s["input_dist"] = distribution_json(cfg.qx);
  s["mutual_info"] = info_profile(cfg.qx, cfg.ch).mutual_info_bits;
  s["rate_mode"] = mode;
  s["delta"] = cfg.delta;
  s["trials"] = cfg.trials;
  s["seed"] = cfg.master_seed;
  s["n_list"] = cfg.n_list;
  if (sweep.fit) {
    s["slope"] = sweep.fit->slope;
    s["stderr"] = sweep.fit->stderr_;
    s["excluded_n"] = sweep.fit->excluded_n;
  } else {
    s["slope"] = nullptr;
    s["stderr"] = nullptr;
    s["excluded_n"] = json::array();
  }
  s["fit_note"] = sweep.fit_note;
  s["gamma_delta"] = sweep.per_n.empty() ? json(nullptr) : number_or_null(sweep.per_n.front().plan.gamma_delta);

  bool all_vacuous = true;
  json per_n = json::array();
  for (const auto& bl : sweep.per_n) {
    json e;
    e["n"] = bl.plan.n;
    e["rate_bits"] = bl.plan.rate_bits;
    e["codebook_size"] = bl.plan.codebook_size;
    e["epsilon"] = bl.plan.epsilon;
    e["median_tv"] = bl.median_tv;
    json tails = json::array();
    for (const auto& t : bl.tails) tails.push_back(tail_json(t));
    e["tails"] = tails;
    json th;
    th["tv_threshold"] = number_or_null(bl.plan.bound_tv_threshold);
    th["failure_prob_log"] = number_or_null(bl.plan.failure_prob_log);
    th["vacuous"] = bl.plan.vacuous;
    th["empirical_tail"] = bl.theorem_tail ? tail_json(*bl.theorem_tail) : json(nullptr);
    th["consistent"] = bl.theorem_consistent;
    e["theorem"] = th;
    all_vacuous = all_vacuous && bl.plan.vacuous;
    per_n.push_back(e);
  }
  s["per_n"] = per_n;
  s["all_bounds_vacuous"] = all_vacuous;
  auto notes = common_notes();
  if (all_vacuous) {
    notes.push_back(
        "every failure bound in this run is vacuous: the bounds drop below 1 only at blocklengths "
        "where exhaustive enumeration of the output space is infeasible.");
  }
  s["paper_notes"] = notes;
  write_file(dir / "summary.json", s.dump(2) + "\n");

  out << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "summary.json").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// gaussian

int cmd_gaussian(const Params& p, std::ostream& out) {
  gaussian::GaussianSetup setup;
  setup.snr = p.number("snr").value_or(setup.snr);
  setup.dim = static_cast<int>(p.integer("dim").value_or(setup.dim));
  setup.b = static_cast<int>(p.integer("b").value_or(setup.b));
  setup.noise_var = p.number("noise_var").value_or(setup.noise_var);
  setup.seed = p.unsigned64("seed").value_or(0);
  setup.validate();

  const bool optimize = p.boolean("optimize").value_or(false);
  const std::string init = p.string("init").value_or("random");
  if (init != "random" && init != "quantile") throw bad_input("init must be 'random' or 'quantile'");
  const int max_iters = static_cast<int>(p.integer("max_iters").value_or(500));
  const double tol = p.number("tol").value_or(1e-4);
  const int points = static_cast<int>(p.integer("grid_points").value_or(setup.dim == 1 ? 1001 : 201));
  const double half_width = p.number("grid_half_width").value_or(8.0);
  if (points < 3) throw bad_input("grid_points must be at least 3");
  if (!(half_width > 0.0)) throw bad_input("grid_half_width must be positive");
  if (max_iters < 0 || !(tol > 0.0)) throw bad_input("max_iters must be >= 0 and tol > 0");

  auto cb = init == "random" ? gaussian::sample_gaussian_codebook(setup) : gaussian::quantile_codebook(setup);
  const double initial_tv = gaussian::mixture_tv(cb, setup);
  double tv = initial_tv;
  int iterations = 0;
  if (optimize) {
    auto res = gaussian::optimize_codewords(cb, setup, max_iters, tol);
    cb = std::move(res.codebook);
    tv = res.tv;
    iterations = res.iterations;
  }

  const auto dir = prepare_out_dir(p.string("out").value_or("."));
  const auto grid = gaussian::emit_density_grid(cb, setup, points, half_width);

  std::string csv;
  if (setup.dim == 1) {
    csv = "x,mixture,target\n";
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      csv += format_double(grid.xs[i]) + ',' + format_double(grid.mixture[i]) + ',' +
             format_double(grid.target[i]) + '\n';
    }
  } else {
    csv = "x,y,mixture\n";
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      for (std::size_t k = 0; k < grid.ys.size(); ++k) {
        csv += format_double(grid.xs[i]) + ',' + format_double(grid.ys[k]) + ',' +
               format_double(grid.mixture[i * grid.ys.size() + k]) + '\n';
      }
    }
  }
  write_file(dir / "density_grid.csv", csv);

  std::string words = setup.dim == 1 ? "x\n" : "x,y\n";
  for (std::size_t k = 0; k < cb.size(); ++k) {
    const auto pt = cb.point(k);
    for (std::size_t j = 0; j < pt.size(); ++j) words += (j ? "," : "") + format_double(pt[j]);
    words += '\n';
  }
  write_file(dir / "codewords.csv", words);

  json j;
  j["tv"] = tv;
  j["seed"] = setup.seed;
  j["optimized"] = optimize;
  j["init"] = init;
  j["initial_tv"] = initial_tv;
  j["iterations"] = iterations;
  j["snr"] = setup.snr;
  j["dim"] = setup.dim;
  j["b"] = setup.b;
  j["noise_var"] = setup.noise_var;
  j["codebook_size"] = cb.size();
  j["mutual_info_bits"] = gaussian::mutual_info_bits(setup.snr);
  j["rate_bits"] = std::log2(static_cast<double>(setup.b));
  j["paper_notes"] = json::array({
      "tv is computed by trapezoid quadrature and is accurate to roughly 1e-6.",
      "optimized codebooks come from a local pattern search; no optimality is claimed.",
  });
  write_file(dir / "tv.json", j.dump(2) + "\n");

  out << "wrote " << (dir / "density_grid.csv").string() << ", codewords.csv and tv.json (tv="
      << format_double(tv) << ")\n";
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

ChannelSpec parse_channel_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos && text.front() != '{') {
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "bsc") {
      return {FiniteDistribution::uniform(2), binary_symmetric_channel(parse_number<double>(arg, "bsc crossover")),
              text};
    }
    if (kind == "bec") {
      return {FiniteDistribution::uniform(2), binary_erasure_channel(parse_number<double>(arg, "bec erasure")),
              text};
    }
    if (kind == "noiseless") {
      const auto k = parse_number<std::size_t>(arg, "noiseless alphabet size");
      return {FiniteDistribution::uniform(k), noiseless_channel(k), text};
    }
  }
  if (!text.empty() && text.front() == '{') {
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw bad_input(std::string("invalid inline channel JSON: ") + e.what());
    }
    return channel_from_json(obj, "custom");
  }
  if (fs::is_regular_file(text)) return channel_from_json(read_json_file(text), text);
  throw bad_input("unrecognized channel spec '" + text + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

unsigned resolve_threads(std::optional<long long> flag, std::optional<long long> config) {
  auto checked = [](long long v, const char* what) {
    if (v < 1 || v > 4096) throw bad_input(std::string(what) + " must be between 1 and 4096");
    return static_cast<unsigned>(v);
  };
  if (flag) return checked(*flag, "--threads");
  if (const char* env = std::getenv("SOFTCOVER_THREADS"); env && *env) {
    return checked(parse_number<long long>(env, "SOFTCOVER_THREADS"), "SOFTCOVER_THREADS");
  }
  if (config) return checked(*config, "threads");
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"softcover: soft-covering exponents, bounds and random-codebook experiments"};
  app.require_subcommand(1);

  auto make = [&](const char* name, const char* help) {
    Subcommand sc;
    sc.app = app.add_subcommand(name, help);
    sc.binder = std::make_unique<Binder>(sc.app);
    return sc;
  };

  Subcommand exponent = make("exponent", "exponent gamma_delta and the fixed-rate failure bound");
  add_common(exponent, false, false);
  exponent.binder->option<double>("--rate,-R", "rate", "codebook rate in bits per symbol");
  exponent.binder->option<double>("--delta", "delta", "rate backoff delta");
  exponent.binder->option<long long>("-n,--blocklength", "n", "blocklength for the failure bound");
  exponent.keys.insert({"rate", "delta", "n"});

  Subcommand second = make("second-order", "second-order rate plan");
  add_common(second, false, false);
  second.binder->option<double>("--epsilon,--eps", "epsilon", "target TV level");
  second.binder->option<long long>("-n,--blocklength", "n", "blocklength");
  second.binder->option<double>("--c", "c", "log-term coefficient (> 2)");
  second.binder->option<double>("--d", "d", "failure exponent (< c - 1)");
  second.binder->option<double>("--r", "r", "slack coefficient in (0, c - d - 1)");
  second.keys.insert({"epsilon", "n", "c", "d", "r"});

  Subcommand simulate = make("simulate", "Monte Carlo sweep of random codebooks");
  add_common(simulate, true, true);
  simulate.binder->int_list("--n-list", "n_list", "blocklengths: 4,6,8 or 4..14");
  simulate.binder->option<double>("--rate,-R", "rate", "fixed rate in bits per symbol");
  simulate.binder->option<std::string>("--rate-mode", "rate_mode", "fixed or second_order");
  simulate.binder->option<double>("--epsilon-target", "epsilon_target", "second-order target TV");
  simulate.binder->option<double>("--c", "c", "second-order c");
  simulate.binder->option<double>("--d", "d", "second-order d");
  simulate.binder->option<double>("--r", "r", "second-order r");
  simulate.binder->option<long long>("--trials", "trials", "codebooks per blocklength");
  simulate.binder->option<double>("--delta", "delta", "rate backoff delta");
  simulate.binder->option<double>("--epsilon", "epsilon", "typicality slack override");
  simulate.binder->double_list("--thresholds", "thresholds", "extra TV levels for tail estimates");
  simulate.binder->option<std::string>("--path", "path", "auto, generic or bsc");
  simulate.binder->option<std::uint64_t>("--max-codewords", "max_codewords", "codebook size cap");
  simulate.binder->option<std::uint64_t>("--max-space", "max_space", "output space cap");
  simulate.keys.insert({"n_list", "rate", "rate_mode", "epsilon_target", "c", "d", "r", "trials", "delta",
                        "epsilon", "thresholds", "path", "max_codewords", "max_space"});

  Subcommand gauss = make("gaussian", "Gaussian mixture synthesis demo");
  add_common(gauss, true, false);
  gauss.binder->option<double>("--snr", "snr", "signal-to-noise ratio");
  gauss.binder->option<long long>("--dim", "dim", "dimension (1 or 2)");
  gauss.binder->option<long long>("-b,--b", "b", "codewords per dimension");
  gauss.binder->option<double>("--noise-var", "noise_var", "noise variance");
  gauss.binder->flag("--optimize", "optimize", "refine codewords by pattern search");
  gauss.binder->option<std::string>("--init", "init", "random or quantile starting codebook");
  gauss.binder->option<long long>("--max-iters", "max_iters", "optimizer sweep limit");
  gauss.binder->option<double>("--tol", "tol", "optimizer step tolerance");
  gauss.binder->option<long long>("--grid-points", "grid_points", "density grid points per axis");
  gauss.binder->option<double>("--grid-half-width", "grid_half_width", "grid half width in target sigmas");
  gauss.keys.insert({"snr", "dim", "b", "noise_var", "optimize", "init", "max_iters", "tol", "grid_points",
                     "grid_half_width"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (exponent.app->parsed()) return cmd_exponent(merged_params(exponent), out);
    if (second.app->parsed()) return cmd_second_order(merged_params(second), out);
    if (simulate.app->parsed()) return cmd_simulate(merged_params(simulate), simulate.threads(), out, err);
    if (gauss.app->parsed()) return cmd_gaussian(merged_params(gauss), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_resource_cap(e.code()) ? kResourceCap : kInvalidInput;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kInvalidInput;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace softcover::cli
