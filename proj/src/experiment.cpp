#include "conslaw/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "conslaw/constructions.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/fractional_variation.hpp"
#include "conslaw/numerics.hpp"
#include "conslaw/transport_solver.hpp"

namespace conslaw {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool to_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool to_long(const std::string& s, long long& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(t.c_str(), &end, 10);
    return end == t.c_str() + t.size();
}

bool to_bool(const std::string& s, bool& out) {
    const std::string t = trim(s);
    if (t == "true" || t == "1") return out = true, true;
    if (t == "false" || t == "0") return out = false, true;
    return false;
}

bool to_double_list(const std::string& s, std::vector<double>& out) {
    out.clear();
    for (const auto& piece : split(s, ',')) {
        double v;
        if (!to_double(piece, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

// ---- typed config access (keys are pre-validated) ------------------------

std::optional<std::string> raw(const ExperimentConfig& cfg, const std::string& key) {
    auto it = cfg.values.find(key);
    if (it == cfg.values.end()) return std::nullopt;
    return it->second;
}

double opt_double(const ExperimentConfig& cfg, const std::string& key, double def) {
    auto v = raw(cfg, key);
    if (!v) return def;
    double out = def;
    to_double(*v, out);
    return out;
}

long long opt_long(const ExperimentConfig& cfg, const std::string& key, long long def) {
    auto v = raw(cfg, key);
    if (!v) return def;
    long long out = def;
    to_long(*v, out);
    return out;
}

bool opt_bool(const ExperimentConfig& cfg, const std::string& key, bool def) {
    auto v = raw(cfg, key);
    if (!v) return def;
    bool out = def;
    to_bool(*v, out);
    return out;
}

std::vector<double> opt_list(const ExperimentConfig& cfg, const std::string& key,
                             std::vector<double> def) {
    auto v = raw(cfg, key);
    if (!v) return def;
    std::vector<double> out;
    to_double_list(*v, out);
    return out;
}

// ---- CSV artifact --------------------------------------------------------

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::string& config_hash,
        const std::string& header) {
        file_.open(path, std::ios::binary);  // "\n" endings on every platform
        if (!file_) throw Error("cannot open output file " + path.string());
        file_ << "# config_hash=" << config_hash << "\n" << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) file_ << ',';
            file_ << cells[i];
        }
        file_ << "\n";
        if (!file_) throw Error("write failure on CSV artifact");
    }

private:
    std::ofstream file_;
};

void add_check(RunManifest& m, const std::string& name, bool passed,
               const std::string& detail) {
    m.checks.push_back({name, passed, detail});
}

double sine_profile(double theta) { return std::sin(2.0 * std::numbers::pi * theta); }

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * h;
    g.back() = hi;
    return g;
}

double max_wave_speed(const Flux& flux) {
    const auto& dom = flux.domain();
    double amax = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double u = dom.lo() + dom.width() * static_cast<double>(i) / 256.0;
        amax = std::max(amax, std::fabs(flux.derivative(u, 1)));
    }
    return amax;
}

// ---- experiment pipelines ------------------------------------------------

void run_degeneracy(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "degeneracy-report";
    const auto report = degeneracy_report(*cfg.flux);

    m.stage = "write-degeneracy-csv";
    Csv csv(cfg.out_dir / "degeneracy.csv", cfg.config_hash,
            "flux,d,base_state,alpha_fit,p_holder,alpha_d_consistent");
    csv.row({cfg.flux->describe(), report.d ? std::to_string(*report.d) : "none",
             fmt17(report.base_state), fmt17(report.alpha_fit), fmt17(report.p_holder),
             report.alpha_d_consistent ? "1" : "0"});

    m.stage = "degeneracy-checks";
    if (auto v = raw(cfg, "degeneracy.expect_d")) {
        long long want;
        to_long(*v, want);
        const bool pass = report.d && *report.d == want;
        add_check(m, "degeneracy-order", pass,
                  "d=" + (report.d ? std::to_string(*report.d) : "none") +
                      " expected=" + std::to_string(want));
    }
    if (raw(cfg, "degeneracy.expect_base")) {
        const double want = opt_double(cfg, "degeneracy.expect_base", 0.0);
        const double tol = opt_double(cfg, "degeneracy.base_tol", 1e-12);
        const bool pass = std::fabs(report.base_state - want) <= tol;
        add_check(m, "degeneracy-base-state", pass,
                  "base=" + fmt17(report.base_state) + " expected=" + fmt17(want) +
                      " tol=" + fmt17(tol));
    }
    if (raw(cfg, "degeneracy.alpha_center")) {
        const double want = opt_double(cfg, "degeneracy.alpha_center", 0.0);
        const double tol = opt_double(cfg, "degeneracy.alpha_tol", 0.05);
        const bool pass = std::fabs(report.alpha_fit - want) <= tol;
        add_check(m, "degeneracy-alpha", pass,
                  "alpha=" + fmt17(report.alpha_fit) + " expected=" + fmt17(want) +
                      " tol=" + fmt17(tol));
    }
    if (raw(cfg, "degeneracy.p_center")) {
        const double want = opt_double(cfg, "degeneracy.p_center", 1.0);
        const double rel = opt_double(cfg, "degeneracy.p_rel_tol", 0.05);
        const bool pass = std::fabs(report.p_holder - want) <= rel * want;
        add_check(m, "degeneracy-holder-exponent", pass,
                  "p=" + fmt17(report.p_holder) + " expected=" + fmt17(want) +
                      " rel_tol=" + fmt17(rel));
    }
}

void run_variation(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "variation-setup";
    const double s = opt_double(cfg, "variation.s", 0.5);
    const double eta = opt_double(cfg, "variation.eta", 0.25);
    const auto params = OscillatorParams::from_exponents(s, eta);
    const auto n_samples = static_cast<std::size_t>(opt_long(cfg, "variation.samples", 2001));
    const auto truncation =
        static_cast<std::size_t>(opt_long(cfg, "variation.truncation", 10000));

    m.stage = "variation-tv";
    const auto xs = uniform_grid(0.0, 1.0, n_samples);
    std::vector<double> gv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) gv[i] = oscillator(params, xs[i]);
    const auto tv = tv_s(SampledFunction(xs, gv), s);

    Csv tv_csv(cfg.out_dir / "variation.csv", cfg.config_hash,
               "s,eta,samples,tv_s,partition_points");
    tv_csv.row({fmt17(s), fmt17(eta), std::to_string(n_samples), fmt17(tv.value),
                std::to_string(tv.partition.size())});

    m.stage = "variation-series";
    const std::vector<double> qs =
        opt_list(cfg, "variation.q_values", {1.0 / s, 1.0 / (s + eta)});
    Csv growth_csv(cfg.out_dir / "growth.csv", cfg.config_hash,
                   "q,verdict,model,limit_or_rate,fit_quality,tail_gamma,tail_increase");
    std::vector<GrowthClass> classes;
    for (double q : qs) {
        SeriesProbe probe;
        probe.amplitude = [&params](std::size_t k) {
            return oscillator_amplitude(params, static_cast<int>(k));
        };
        probe.q = q;
        probe.truncation = truncation;
        const auto cls = classify_growth(partial_variation_series(probe));
        classes.push_back(cls);
        growth_csv.row({fmt17(q), cls.verdict == Verdict::Convergent ? "convergent" : "divergent",
                        cls.model, fmt17(cls.limit_or_rate), fmt17(cls.fit_quality),
                        fmt17(cls.tail_gamma), fmt17(cls.tail_increase)});
    }

    m.stage = "variation-checks";
    if (opt_bool(cfg, "variation.check_q1_convergent", false) && !classes.empty()) {
        const bool pass = classes[0].verdict == Verdict::Convergent;
        add_check(m, "series-q1-convergent", pass,
                  "q=" + fmt17(qs[0]) + " tail_increase=" + fmt17(classes[0].tail_increase));
    }
    if (opt_bool(cfg, "variation.check_q2_divergent", false) && classes.size() > 1) {
        const bool pass = classes[1].verdict == Verdict::Divergent;
        add_check(m, "series-q2-divergent", pass,
                  "q=" + fmt17(qs[1]) + " model=" + classes[1].model);
    }
    if (raw(cfg, "variation.tail_exponent_center") && !classes.empty()) {
        const double want = opt_double(cfg, "variation.tail_exponent_center", 0.0);
        const double tol = opt_double(cfg, "variation.tail_exponent_tol", 0.1);
        const double got = 1.0 + classes[0].tail_gamma;
        add_check(m, "series-tail-exponent", std::fabs(got - want) <= tol,
                  "exponent=" + fmt17(got) + " expected=" + fmt17(want) + " tol=" + fmt17(tol));
    }
    if (raw(cfg, "variation.log_quality_min") && classes.size() > 1) {
        const double floor = opt_double(cfg, "variation.log_quality_min", 0.99);
        const bool pass =
            classes[1].model == "log" && classes[1].fit_quality >= floor;
        add_check(m, "series-log-quality", pass,
                  "model=" + classes[1].model + " quality=" + fmt17(classes[1].fit_quality) +
                      " floor=" + fmt17(floor));
    }
}

void run_cheng(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "certify-delta";
    const double base = opt_double(cfg, "cheng.base_state", 0.0);
    const double target_T = opt_double(cfg, "cheng.target_T", 1.0);
    const double margin = opt_double(cfg, "cheng.margin", 1e-6);
    const double s = opt_double(cfg, "cheng.s", 0.5);
    const double eta = opt_double(cfg, "cheng.eta", 0.25);
    const auto times = opt_list(cfg, "cheng.times", {0.25, 0.5, 1.0});
    const auto dxs = opt_list(cfg, "cheng.dx", {1e-3, 5e-4, 2.5e-4});
    const double cfl = opt_double(cfg, "cheng.cfl", 0.45);
    const double min_slope_floor = opt_double(cfg, "cheng.min_slope_floor", 1e-6);

    const auto params = OscillatorParams::from_exponents(s, eta);
    const auto data = select_delta(*cfg.flux, base, params, target_T, margin);

    Csv summary(cfg.out_dir / "cheng_summary.csv", cfg.config_hash,
                "delta,base_state,monotonicity_margin,certified_T");
    summary.row({fmt17(data.delta), fmt17(data.base_state), fmt17(data.monotonicity_margin),
                 fmt17(data.certified_T_delta)});

    const auto rule = [&data](double y) { return cheng_initial_data(data, y); };
    TransportProblem prob{rule, 0.0, 1.0, data.base_state, data.base_state - data.delta};
    const auto cert_grid = cheng_certification_grid(params);
    std::vector<double> u0v(cert_grid.size());
    for (std::size_t i = 0; i < cert_grid.size(); ++i) u0v[i] = rule(cert_grid[i]);
    const auto tv0 = tv_s(SampledFunction(cert_grid, u0v), s);

    Csv flow_csv(cfg.out_dir / "cheng_flow.csv", cfg.config_hash,
                 "t,min_slope,tv_s_initial,tv_s_transported,values_bitwise_equal");
    Csv err_csv(cfg.out_dir / "cheng_errors.csv", cfg.config_hash, "t,dx,l1_error");
    Csv ord_csv(cfg.out_dir / "cheng_orders.csv", cfg.config_hash, "t,order,r2");

    // reference resolution for the semi-analytic solution (characteristics)
    const auto y_ref = uniform_grid(-0.3, 1.3, 130001);
    const auto x_ref = uniform_grid(-0.2, 1.2, 112001);
    const Interval fv_domain(-0.2, 1.2);

    bool all_slopes_ok = true, identity_ok = true, orders_ok = true;
    double worst_slope = std::numeric_limits<double>::infinity();
    double worst_order = std::numeric_limits<double>::infinity();
    const double order_min = opt_double(cfg, "cheng.order_min", 0.8);

    for (double t : times) {
        m.stage = "flow t=" + fmt17(t);
        const auto flow = characteristic_flow(*cfg.flux, [&prob](double y) { return prob.eval(y); },
                                              t, cert_grid);
        worst_slope = std::min(worst_slope, flow.min_slope);
        if (!(flow.min_slope > min_slope_floor)) all_slopes_ok = false;

        const auto moved = evolve_with_flow(prob, flow, u0v, flow.theta);
        bool bitwise = moved.solution.values.size() == u0v.size();
        if (bitwise)
            for (std::size_t i = 0; i < u0v.size(); ++i)
                if (moved.solution.values[i] != u0v[i]) {
                    bitwise = false;
                    break;
                }
        const auto tv_t = tv_s(moved.solution, s);
        const bool tv_equal = bitwise && tv_t.value == tv0.value && tv_t.partition == tv0.partition;
        if (!tv_equal) identity_ok = false;
        flow_csv.row({fmt17(t), fmt17(flow.min_slope), fmt17(tv0.value), fmt17(tv_t.value),
                      bitwise ? "1" : "0"});

        m.stage = "reference t=" + fmt17(t);
        const auto ref = evolve_continuous(*cfg.flux, prob, t, x_ref, y_ref);

        std::vector<double> le, lerr;
        for (double dx : dxs) {
            m.stage = "godunov t=" + fmt17(t) + " dx=" + fmt17(dx);
            GodunovConfig gc;
            gc.dx = dx;
            gc.cfl = cfl;
            gc.domain = fv_domain;
            const auto n_cells =
                static_cast<std::size_t>(std::llround(fv_domain.width() / dx));
            const double dx_eff = fv_domain.width() / static_cast<double>(n_cells);
            std::vector<double> centers(n_cells), init(n_cells);
            for (std::size_t i = 0; i < n_cells; ++i) {
                centers[i] = fv_domain.lo() + (static_cast<double>(i) + 0.5) * dx_eff;
                init[i] = prob.eval(centers[i]);
            }
            const auto sol = godunov_solve(*cfg.flux, SampledFunction(centers, init), t, gc);
            const double err = l1_distance(ref.solution, sol);
            err_csv.row({fmt17(t), fmt17(dx), fmt17(err)});
            le.push_back(std::log(dx));
            lerr.push_back(std::log(err));
        }
        const auto fit = linear_fit(le, lerr);
        ord_csv.row({fmt17(t), fmt17(fit.slope), fmt17(fit.r2)});
        worst_order = std::min(worst_order, fit.slope);
        if (!(fit.slope >= order_min)) orders_ok = false;
    }

    m.stage = "cheng-checks";
    add_check(m, "flow-min-slope", all_slopes_ok,
              "worst=" + fmt17(worst_slope) + " floor=" + fmt17(min_slope_floor));
    add_check(m, "variation-transport-identity", identity_ok,
              identity_ok ? "bitwise at all times" : "mismatch");
    add_check(m, "finite-volume-order", orders_ok,
              "worst=" + fmt17(worst_order) + " floor=" + fmt17(order_min));
}

void run_wkb(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "wkb-setup";
    const double base = opt_double(cfg, "wkb.base_state", 0.0);
    const int d = static_cast<int>(opt_long(cfg, "wkb.d", 2));
    const auto epsilons = opt_list(cfg, "wkb.epsilons", {0.2, 0.1, 0.05});
    const double T = opt_double(cfg, "wkb.T", 0.025);
    const double t_eval = opt_double(cfg, "wkb.t_eval", T / 2.0);
    const auto cells = static_cast<double>(opt_long(cfg, "wkb.cells_per_window", 1024));
    const double cfl = opt_double(cfg, "wkb.cfl", 0.45);

    const auto wkb = make_wkb_config(*cfg.flux, base, d, sine_profile, epsilons, T);

    Csv res_csv(cfg.out_dir / "wkb_residuals.csv", cfg.config_hash,
                "epsilon,l1,linf,relative");
    std::vector<double> le, lr;
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : epsilons) {
        m.stage = "wkb-residual eps=" + fmt17(eps);
        GodunovConfig gc;
        gc.cfl = cfl;
        gc.dx = std::pow(eps, static_cast<double>(d)) / cells;
        const auto r = wkb_residual(wkb, eps, t_eval, gc);
        res_csv.row({fmt17(eps), fmt17(r.l1), fmt17(r.linf), fmt17(r.relative)});
        if (!(r.relative < prev)) decreasing = false;
        prev = r.relative;
        le.push_back(std::log(eps));
        lr.push_back(std::log(r.relative));
    }

    m.stage = "wkb-summary";
    const auto fit = linear_fit(le, lr);
    Csv sum_csv(cfg.out_dir / "wkb_summary.csv", cfg.config_hash,
                "slope,r2,strictly_decreasing");
    sum_csv.row({fmt17(fit.slope), fmt17(fit.r2), decreasing ? "1" : "0"});

    if (opt_bool(cfg, "wkb.require_decreasing", false))
        add_check(m, "residual-strictly-decreasing", decreasing,
                  "over " + std::to_string(epsilons.size()) + " epsilon values");
    if (raw(cfg, "wkb.slope_min")) {
        const double floor = opt_double(cfg, "wkb.slope_min", 0.8);
        add_check(m, "residual-slope", fit.slope >= floor,
                  "slope=" + fmt17(fit.slope) + " floor=" + fmt17(floor));
    }
}

void run_sweep(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "sweep-setup";
    const double base = opt_double(cfg, "sweep.base_state", 0.0);
    const int d = static_cast<int>(opt_long(cfg, "sweep.d", 2));
    const auto epsilons = opt_list(cfg, "sweep.epsilons", {0.2, 0.1, 0.05, 0.025});
    const double T = opt_double(cfg, "sweep.T", 0.025);
    const double t_eval = opt_double(cfg, "sweep.t_eval", T / 2.0);
    const auto s_primes = opt_list(cfg, "sweep.s_primes", {0.5, 0.7});
    const int ppp = static_cast<int>(opt_long(cfg, "sweep.points_per_period", 32));

    const auto wkb = make_wkb_config(*cfg.flux, base, d, sine_profile, epsilons, T);

    m.stage = "sweep-run";
    const auto report = sobolev_scaling_sweep(wkb, s_primes, t_eval, ppp);

    m.stage = "write-sweep-csv";
    Csv rows_csv(cfg.out_dir / "sweep.csv", cfg.config_hash, "epsilon,s_prime,gagliardo,tvs");
    for (const auto& row : report.rows)
        rows_csv.row({fmt17(row.epsilon), fmt17(row.s_prime), fmt17(row.gagliardo),
                      fmt17(row.tvs)});
    Csv slopes_csv(cfg.out_dir / "slopes.csv", cfg.config_hash,
                   "s_prime,gagliardo_slope,gagliardo_r2,tvs_slope,tvs_r2");
    for (const auto& sl : report.slopes)
        slopes_csv.row({fmt17(sl.s_prime), fmt17(sl.gagliardo_slope), fmt17(sl.gagliardo_r2),
                        fmt17(sl.tvs_slope), fmt17(sl.tvs_r2)});

    m.stage = "sweep-checks";
    if (auto bands = raw(cfg, "sweep.gagliardo_bands")) {
        for (const auto& band : split(*bands, ';')) {
            if (band.empty()) continue;
            const auto parts = split(band, ':');
            double sp, center, tol;
            to_double(parts[0], sp);
            to_double(parts[1], center);
            to_double(parts[2], tol);
            const auto it = std::find_if(
                report.slopes.begin(), report.slopes.end(),
                [sp](const ScalingSlope& sl) { return std::fabs(sl.s_prime - sp) < 1e-12; });
            if (it == report.slopes.end()) {
                add_check(m, "gagliardo-slope-" + trim(parts[0]), false,
                          "no slope row for s'=" + fmt17(sp));
                continue;
            }
            const bool pass = std::fabs(it->gagliardo_slope - center) <= tol;
            add_check(m, "gagliardo-slope-" + trim(parts[0]), pass,
                      "slope=" + fmt17(it->gagliardo_slope) + " center=" + fmt17(center) +
                          " tol=" + fmt17(tol));
        }
    }
}

void run_oracle(const ExperimentConfig& cfg, RunManifest& m) {
    m.stage = "oracle-suite";
    const auto trials = static_cast<std::size_t>(opt_long(cfg, "oracle.trials", 500));
    const auto max_len = static_cast<std::size_t>(opt_long(cfg, "oracle.max_len", 12));
    const auto s_values = opt_list(cfg, "oracle.s_values", {0.25, 0.5, 1.0});

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> len_dist(3, max_len);
    std::uniform_real_distribution<double> val_dist(-1.0, 1.0);

    Csv csv(cfg.out_dir / "oracle.csv", cfg.config_hash, "trial,n,s,dp,bruteforce,equal");
    std::size_t mismatches = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t n = len_dist(rng);
        std::vector<double> xs(n), vs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = static_cast<double>(i);
            vs[i] = val_dist(rng);
        }
        const SampledFunction f(xs, vs);
        for (double s : s_values) {
            const auto dp = tv_s(f, s);
            const double brute = tv_s_bruteforce(f, s);
            const bool equal = dp.value == brute;
            if (!equal) ++mismatches;
            csv.row({std::to_string(trial), std::to_string(n), fmt17(s), fmt17(dp.value),
                     fmt17(brute), equal ? "1" : "0"});
        }
    }
    add_check(m, "dp-equals-bruteforce", mismatches == 0,
              std::to_string(trials) + " trials x " + std::to_string(s_values.size()) +
                  " exponents, " + std::to_string(mismatches) + " mismatches");
}

// ---- validation ----------------------------------------------------------

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"run", {"kind", "out", "seed", "cost_ceiling"}},
        {"flux", {"family", "coefficients", "exponent", "domain"}},
        {"degeneracy",
         {"expect_d", "expect_base", "base_tol", "alpha_center", "alpha_tol", "p_center",
          "p_rel_tol"}},
        {"variation",
         {"s", "eta", "truncation", "samples", "q_values", "check_q1_convergent",
          "check_q2_divergent", "tail_exponent_center", "tail_exponent_tol",
          "log_quality_min"}},
        {"cheng",
         {"base_state", "target_T", "margin", "s", "eta", "times", "dx", "cfl", "order_min",
          "min_slope_floor"}},
        {"wkb",
         {"base_state", "d", "epsilons", "T", "t_eval", "cells_per_window", "cfl",
          "slope_min", "require_decreasing"}},
        {"sweep",
         {"base_state", "d", "epsilons", "T", "t_eval", "s_primes", "points_per_period",
          "gagliardo_bands"}},
        {"oracle", {"trials", "max_len", "s_values"}},
    };
    return keys;
}

bool kind_needs_flux(ExperimentKind kind) {
    return kind == ExperimentKind::Degeneracy || kind == ExperimentKind::Cheng ||
           kind == ExperimentKind::Wkb || kind == ExperimentKind::Sweep;
}

void check_double(const ExperimentConfig& cfg, const std::string& key, double lo, double hi,
                  bool lo_strict, bool hi_strict, std::vector<std::string>& problems) {
    auto v = raw(cfg, key);
    if (!v) return;
    double out;
    if (!to_double(*v, out)) {
        problems.push_back(key + ": not a number (" + *v + ")");
        return;
    }
    const bool lo_ok = lo_strict ? out > lo : out >= lo;
    const bool hi_ok = hi_strict ? out < hi : out <= hi;
    if (!lo_ok || !hi_ok)
        problems.push_back(key + ": " + *v + " outside " + (lo_strict ? "(" : "[") + fmt17(lo) +
                           ", " + fmt17(hi) + (hi_strict ? ")" : "]"));
}

void check_long(const ExperimentConfig& cfg, const std::string& key, long long lo, long long hi,
                std::vector<std::string>& problems) {
    auto v = raw(cfg, key);
    if (!v) return;
    long long out;
    if (!to_long(*v, out)) {
        problems.push_back(key + ": not an integer (" + *v + ")");
        return;
    }
    if (out < lo || out > hi)
        problems.push_back(key + ": " + *v + " outside [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
}

void check_bool(const ExperimentConfig& cfg, const std::string& key,
                std::vector<std::string>& problems) {
    auto v = raw(cfg, key);
    if (!v) return;
    bool out;
    if (!to_bool(*v, out)) problems.push_back(key + ": not a boolean (" + *v + ")");
}

void check_list(const ExperimentConfig& cfg, const std::string& key, double lo, double hi,
                std::vector<std::string>& problems) {
    auto v = raw(cfg, key);
    if (!v) return;
    std::vector<double> out;
    if (!to_double_list(*v, out)) {
        problems.push_back(key + ": not a comma-separated number list (" + *v + ")");
        return;
    }
    for (double x : out)
        if (!(x >= lo && x <= hi)) {
            problems.push_back(key + ": entry " + fmt17(x) + " outside [" + fmt17(lo) + ", " +
                               fmt17(hi) + "]");
            return;
        }
}

// Estimated cell updates (finite-volume cells x steps, or quadrature point
// pairs for the sweep), compared against the configured ceiling.
double estimate_cost(const ExperimentConfig& cfg) {
    const double amax = cfg.flux ? std::max(max_wave_speed(*cfg.flux), 1e-12) : 1.0;
    switch (cfg.kind) {
        case ExperimentKind::Degeneracy:
            return 1e6;
        case ExperimentKind::Variation: {
            const double n = static_cast<double>(opt_long(cfg, "variation.samples", 2001));
            const double trunc =
                static_cast<double>(opt_long(cfg, "variation.truncation", 10000));
            return n * n + trunc;
        }
        case ExperimentKind::Cheng: {
            const auto times = opt_list(cfg, "cheng.times", {0.25, 0.5, 1.0});
            const auto dxs = opt_list(cfg, "cheng.dx", {1e-3, 5e-4, 2.5e-4});
            const double cfl = opt_double(cfg, "cheng.cfl", 0.45);
            double total = 2e7;  // characteristic reference flows
            for (double t : times)
                for (double dx : dxs) {
                    const double cells = 1.4 / dx;
                    const double steps = std::ceil(t * amax / (cfl * dx)) + 1.0;
                    total += cells * steps;
                }
            return total;
        }
        case ExperimentKind::Wkb: {
            const auto epsilons = opt_list(cfg, "wkb.epsilons", {0.2, 0.1, 0.05});
            const double cells = static_cast<double>(opt_long(cfg, "wkb.cells_per_window", 1024));
            const double cfl = opt_double(cfg, "wkb.cfl", 0.45);
            const double T = opt_double(cfg, "wkb.T", 0.025);
            const double t_eval = opt_double(cfg, "wkb.t_eval", T / 2.0);
            const int d = static_cast<int>(opt_long(cfg, "wkb.d", 2));
            double total = 0.0;
            for (double eps : epsilons) {
                const double dx = std::pow(eps, static_cast<double>(d)) / cells;
                total += cells * (std::ceil(t_eval * amax / (cfl * dx)) + 1.0) + 1e5;
            }
            return total;
        }
        case ExperimentKind::Sweep: {
            const auto epsilons = opt_list(cfg, "sweep.epsilons", {0.2, 0.1, 0.05, 0.025});
            const auto s_primes = opt_list(cfg, "sweep.s_primes", {0.5, 0.7});
            const double ppp =
                static_cast<double>(opt_long(cfg, "sweep.points_per_period", 32));
            const int d = static_cast<int>(opt_long(cfg, "sweep.d", 2));
            double total = 0.0;
            for (double eps : epsilons) {
                const double n =
                    std::max(ppp / std::pow(eps, static_cast<double>(d)), 1025.0);
                total += n * n * static_cast<double>(s_primes.size()) * 2.0 + 1e5;
            }
            return total;
        }
        case ExperimentKind::OracleCheck: {
            const double trials = static_cast<double>(opt_long(cfg, "oracle.trials", 500));
            const double max_len = static_cast<double>(opt_long(cfg, "oracle.max_len", 12));
            const double s_count =
                static_cast<double>(opt_list(cfg, "oracle.s_values", {0.25, 0.5, 1.0}).size());
            return trials * s_count * (std::pow(2.0, max_len) * max_len + max_len * max_len);
        }
    }
    return 0.0;
}

}  // namespace

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "degeneracy") return ExperimentKind::Degeneracy;
    if (name == "variation") return ExperimentKind::Variation;
    if (name == "cheng") return ExperimentKind::Cheng;
    if (name == "wkb") return ExperimentKind::Wkb;
    if (name == "sweep") return ExperimentKind::Sweep;
    if (name == "oracle-check") return ExperimentKind::OracleCheck;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Degeneracy: return "degeneracy";
        case ExperimentKind::Variation: return "variation";
        case ExperimentKind::Cheng: return "cheng";
        case ExperimentKind::Wkb: return "wkb";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::OracleCheck: return "oracle-check";
    }
    return "unknown";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<ExperimentKind> cli_kind) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open config file " + path.string(), 0);
    std::stringstream ss;
    ss << file.rdbuf();

    ExperimentConfig cfg;
    cfg.raw_text = ss.str();
    cfg.config_hash = fnv1a_hex(cfg.raw_text);

    // ---- parse phase: structure errors abort with a line number ----
    std::string section;
    std::vector<std::string> problems;
    std::istringstream lines(cfg.raw_text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ParseError("malformed section header: " + t, lineno);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ParseError("empty section name", lineno);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected `key = value`: " + t, lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (section.empty())
            throw ParseError("key `" + key + "` appears before any [section]", lineno);
        const std::string full = section + "." + key;
        if (cfg.values.count(full))
            problems.push_back(full + ": duplicate key");
        cfg.values[full] = value;
    }

    // ---- validation phase: collect every problem ----
    // kind: CLI subcommand is authoritative; [run] kind must agree
    std::optional<ExperimentKind> file_kind;
    if (auto v = raw(cfg, "run.kind")) {
        try {
            file_kind = kind_from_name(*v);
        } catch (const std::invalid_argument& e) {
            problems.emplace_back(e.what());
        }
    }
    if (cli_kind) {
        cfg.kind = *cli_kind;
        if (file_kind && *file_kind != *cli_kind)
            problems.push_back("run.kind: config says " + kind_name(*file_kind) +
                               " but the subcommand is " + kind_name(*cli_kind));
    } else if (file_kind) {
        cfg.kind = *file_kind;
    } else {
        problems.emplace_back("run.kind: required when no subcommand supplies the kind");
    }

    // unknown sections/keys (typos surface as validation errors)
    for (const auto& [full, value] : cfg.values) {
        const auto dot = full.find('.');
        const std::string sec = full.substr(0, dot);
        const std::string key = full.substr(dot + 1);
        const auto it = allowed_keys().find(sec);
        if (it == allowed_keys().end())
            problems.push_back(full + ": unknown section [" + sec + "]");
        else if (!it->second.count(key))
            problems.push_back(full + ": unknown key in [" + sec + "]");
    }

    if (auto v = raw(cfg, "run.out")) {
        if (v->empty())
            problems.emplace_back("run.out: empty path");
        else
            cfg.out_dir = *v;
    }
    if (auto v = raw(cfg, "run.seed")) {
        long long seed;
        if (!to_long(*v, seed) || seed < 0)
            problems.push_back("run.seed: not a non-negative integer (" + *v + ")");
        else
            cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (auto v = raw(cfg, "run.cost_ceiling")) {
        double ceiling;
        if (!to_double(*v, ceiling) || !(ceiling > 0))
            problems.push_back("run.cost_ceiling: not a positive number (" + *v + ")");
        else
            cfg.cost_ceiling = ceiling;
    }

    // flux section
    const bool needs_flux = kind_needs_flux(cfg.kind);
    const auto family = raw(cfg, "flux.family");
    if (!family) {
        if (needs_flux)
            problems.push_back("flux.family: required for kind " + kind_name(cfg.kind));
    } else {
        Interval domain(-1.0, 1.0);
        bool domain_ok = true;
        if (auto v = raw(cfg, "flux.domain")) {
            std::vector<double> ends;
            if (!to_double_list(*v, ends) || ends.size() != 2 || !(ends[0] < ends[1])) {
                problems.push_back("flux.domain: expected `lo, hi` with lo < hi (" + *v + ")");
                domain_ok = false;
            } else {
                domain = Interval(ends[0], ends[1]);
            }
        } else {
            problems.emplace_back("flux.domain: required with flux.family");
            domain_ok = false;
        }
        if (*family == "polynomial") {
            auto v = raw(cfg, "flux.coefficients");
            std::vector<double> coeffs;
            if (!v)
                problems.emplace_back("flux.coefficients: required for polynomial family");
            else if (!to_double_list(*v, coeffs) || coeffs.size() < 2)
                problems.push_back(
                    "flux.coefficients: expected >= 2 comma-separated numbers (" + *v + ")");
            else if (domain_ok)
                cfg.flux = Flux::polynomial(coeffs, domain);
        } else if (*family == "power-law") {
            auto v = raw(cfg, "flux.exponent");
            double p = 0.0;
            if (!v)
                problems.emplace_back("flux.exponent: required for power-law family");
            else if (!to_double(*v, p) || !(p >= 1.0))
                problems.push_back("flux.exponent: expected a number >= 1 (" + *v + ")");
            else if (domain_ok)
                cfg.flux = Flux::power_law(p, domain);
        } else {
            problems.push_back("flux.family: expected polynomial or power-law (" + *family +
                               ")");
        }
    }

    // kind-specific plausibility
    check_long(cfg, "degeneracy.expect_d", 1, 64, problems);
    check_double(cfg, "degeneracy.base_tol", 0.0, 1.0, true, false, problems);
    check_double(cfg, "degeneracy.alpha_tol", 0.0, 10.0, true, false, problems);
    check_double(cfg, "degeneracy.p_rel_tol", 0.0, 1.0, true, false, problems);
    check_double(cfg, "degeneracy.expect_base", -1e300, 1e300, true, true, problems);
    check_double(cfg, "degeneracy.alpha_center", -1e300, 1e300, true, true, problems);
    check_double(cfg, "degeneracy.p_center", 0.0, 1e300, true, true, problems);

    check_double(cfg, "variation.s", 0.0, 1.0, true, true, problems);
    check_double(cfg, "variation.eta", 0.0, 1.0, true, true, problems);
    check_long(cfg, "variation.truncation", 20, 100000000, problems);
    check_long(cfg, "variation.samples", 8, 100000, problems);
    check_list(cfg, "variation.q_values", 1.0, 64.0, problems);
    check_bool(cfg, "variation.check_q1_convergent", problems);
    check_bool(cfg, "variation.check_q2_divergent", problems);
    check_double(cfg, "variation.tail_exponent_center", 0.0, 64.0, true, true, problems);
    check_double(cfg, "variation.tail_exponent_tol", 0.0, 10.0, true, false, problems);
    check_double(cfg, "variation.log_quality_min", 0.0, 1.0, true, false, problems);

    check_double(cfg, "cheng.target_T", 0.0, 1e300, false, true, problems);
    check_double(cfg, "cheng.margin", 0.0, 1.0, true, true, problems);
    check_double(cfg, "cheng.s", 0.0, 1.0, true, true, problems);
    check_double(cfg, "cheng.eta", 0.0, 1.0, true, true, problems);
    check_list(cfg, "cheng.times", 0.0, 1e300, problems);
    check_list(cfg, "cheng.dx", 1e-12, 1.0, problems);
    check_double(cfg, "cheng.cfl", 0.0, 1.0, true, true, problems);
    check_double(cfg, "cheng.order_min", 0.0, 8.0, true, true, problems);
    check_double(cfg, "cheng.min_slope_floor", 0.0, 1.0, true, true, problems);

    check_long(cfg, "wkb.d", 1, 16, problems);
    check_list(cfg, "wkb.epsilons", 1e-12, 1.0, problems);
    check_double(cfg, "wkb.T", 0.0, 1e300, true, true, problems);
    check_double(cfg, "wkb.t_eval", 0.0, 1e300, false, true, problems);
    check_long(cfg, "wkb.cells_per_window", 16, 1048576, problems);
    check_double(cfg, "wkb.cfl", 0.0, 1.0, true, true, problems);
    check_double(cfg, "wkb.slope_min", -8.0, 8.0, true, true, problems);
    check_bool(cfg, "wkb.require_decreasing", problems);

    check_long(cfg, "sweep.d", 1, 16, problems);
    check_list(cfg, "sweep.epsilons", 1e-12, 1.0, problems);
    check_double(cfg, "sweep.T", 0.0, 1e300, true, true, problems);
    check_double(cfg, "sweep.t_eval", 0.0, 1e300, false, true, problems);
    check_list(cfg, "sweep.s_primes", 1e-12, 1.0 - 1e-12, problems);
    check_long(cfg, "sweep.points_per_period", 4, 65536, problems);
    if (auto bands = raw(cfg, "sweep.gagliardo_bands")) {
        for (const auto& band : split(*bands, ';')) {
            if (band.empty()) continue;
            const auto parts = split(band, ':');
            double x;
            if (parts.size() != 3 || !to_double(parts[0], x) || !to_double(parts[1], x) ||
                !to_double(parts[2], x))
                problems.push_back("sweep.gagliardo_bands: expected `s:center:tol` triples (" +
                                   band + ")");
        }
    }

    check_long(cfg, "oracle.trials", 1, 1000000, problems);
    check_long(cfg, "oracle.max_len", 3, 14, problems);
    check_list(cfg, "oracle.s_values", 1e-12, 1.0, problems);

    // keys that belong to a different kind are legal (one file can drive
    // several subcommands), so no cross-kind pruning here

    if (problems.empty()) {
        if (needs_flux && !cfg.flux)
            problems.emplace_back("flux: construction failed despite valid fields");
    }
    if (problems.empty()) {
        cfg.cost_estimate = estimate_cost(cfg);
        if (cfg.cost_estimate > cfg.cost_ceiling)
            problems.push_back("cost: estimated " + fmt17(cfg.cost_estimate) +
                               " cell updates exceeds ceiling " + fmt17(cfg.cost_ceiling));
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return cfg;
}

std::string manifest_text(const RunManifest& m, const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "tool: " << m.version << "\n";
    out << "kind: " << kind_name(m.kind) << "\n";
    out << "config_hash: " << m.config_hash << "\n";
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", m.wall_ms);
    out << "wall_ms: " << wall << "\n";
    out << "stage: " << m.stage << "\n";
    out << "status: " << (m.ok ? "pass" : "fail") << "\n";
    for (const auto& c : m.checks)
        out << "check " << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " (" << c.detail
            << ")\n";
    for (const auto& e : m.errors) out << "error: " << e << "\n";
    std::istringstream lines(cfg.raw_text);
    std::string line;
    while (std::getline(lines, line)) out << "config |" << line << "\n";
    return out.str();
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
    RunManifest m;
    m.kind = cfg.kind;
    m.config_hash = cfg.config_hash;
    m.version = kToolVersion;
    const auto start = std::chrono::steady_clock::now();

    m.stage = "setup";
    try {
        std::filesystem::create_directories(cfg.out_dir);
        switch (cfg.kind) {
            case ExperimentKind::Degeneracy: run_degeneracy(cfg, m); break;
            case ExperimentKind::Variation: run_variation(cfg, m); break;
            case ExperimentKind::Cheng: run_cheng(cfg, m); break;
            case ExperimentKind::Wkb: run_wkb(cfg, m); break;
            case ExperimentKind::Sweep: run_sweep(cfg, m); break;
            case ExperimentKind::OracleCheck: run_oracle(cfg, m); break;
        }
        m.stage = "completed";
    } catch (const std::exception& e) {
        m.errors.push_back(std::string(e.what()) + " [stage: " + m.stage + "]");
    }

    m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
    m.ok = m.errors.empty() &&
           std::all_of(m.checks.begin(), m.checks.end(),
                       [](const CheckResult& c) { return c.passed; });

    // written even when a stage failed, with that stage named above
    try {
        std::ofstream file(cfg.out_dir / "manifest.txt", std::ios::binary);
        file << manifest_text(m, cfg);
    } catch (const std::exception& e) {
        m.errors.push_back(std::string("manifest write failed: ") + e.what());
        m.ok = false;
    }
    return m;
}

}  // namespace conslaw
