#include "prodiab/harness/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "prodiab/correlator.hpp"
#include "prodiab/error.hpp"

namespace prodiab::harness {

namespace {

const std::vector<std::string> kAllReps{"exact", "adb", "pdb", "pdb-lme"};
constexpr double kLeakLimit = 1e-6;

const std::set<std::string>& known_keys() {
    static const std::set<std::string> k = [] {
        std::set<std::string> s{"scenario",
                                "representations",
                                "grid.start",
                                "grid.end",
                                "grid.points",
                                "jc.g_over_kappa",
                                "jc.gamma_over_kappa",
                                "jc.omega_over_kappa",
                                "jc.delta_over_kappa",
                                "jc.f_over_kappa",
                                "jc.drives",
                                "stirap.g_over_kappa",
                                "stirap.gamma_over_kappa",
                                "stirap.initial_level",
                                "integrator.rel_tol",
                                "integrator.abs_tol",
                                "integrator.max_step",
                                "exact.n_max",
                                "output.dir"};
        for (const char* m : {"H", "V"})
            for (const char* f : {"kind", "center", "halfwidth", "amp", "width"})
                s.insert(std::string("stirap.env_") + m + "." + f);
        return s;
    }();
    return k;
}

PulseEnvelope read_envelope(const Config& c, const std::string& mode, const PulseEnvelope& def) {
    const std::string pre = "stirap.env_" + mode + ".";
    const std::string kind = c.get_string(pre + "kind", def.kind == PulseEnvelope::Kind::boxcar     ? "boxcar"
                                                        : def.kind == PulseEnvelope::Kind::gaussian ? "gaussian"
                                                                                                    : "constant");
    const double amp = c.get_double(pre + "amp", def.amp);
    const double center = c.get_double(pre + "center", def.center);
    int line = 0;
    for (const char* f : {"kind", "amp", "center", "halfwidth", "width"})
        if (!line) line = c.line_of(pre + f);
    try {
        if (kind == "boxcar") return PulseEnvelope::boxcar(center, c.get_double(pre + "halfwidth", def.halfwidth), amp);
        if (kind == "gaussian") return PulseEnvelope::gaussian(amp, center, c.get_double(pre + "width", def.width));
        if (kind == "constant") {
            PulseEnvelope e = PulseEnvelope::constant(amp);
            e.validate();
            return e;
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("envelope ") + mode + ": " + e.what(), line);
    }
    throw ConfigError("unknown envelope kind '" + kind + "'", c.line_of(pre + "kind"));
}

std::string envelope_kind(const PulseEnvelope& e) {
    switch (e.kind) {
        case PulseEnvelope::Kind::boxcar:
            return "boxcar";
        case PulseEnvelope::Kind::gaussian:
            return "gaussian";
        default:
            return "constant";
    }
}

void run_parallel(std::vector<std::function<void()>>& tasks) {
    const unsigned nthreads = std::max(1u, std::min<unsigned>(worker_threads(), unsigned(tasks.size())));
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_real(const std::vector<cd>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, x.real());
    return m;
}

// Per-run output slot filled by a task.
struct RunOutput {
    std::vector<std::pair<std::string, std::vector<double>>> curves;
    InvariantReport worst;
    double leak = 0.0;
    bool leak_flagged = false;
    bool leak_unresolved = false;
    double seconds = 0.0;
    std::vector<std::string> notes;
};

bool wants(const ScenarioConfig& cfg, const std::string& rep) {
    return std::find(cfg.representations.begin(), cfg.representations.end(), rep) != cfg.representations.end();
}

// ---- jc-sigmaz ---------------------------------------------------------

std::vector<double> moment_sigmaz(const JCParams& p, std::span<const double> grid, const IntegratorConfig& ic) {
    const MomentGenerator m = jc_moment_generator(p);
    Eigen::Vector3cd y(0.0, 0.0, -1.0);
    std::vector<double> out(grid.size());
    auto rhs = [&](double, const cd* yy, cd* dy) {
        Eigen::Map<const Eigen::Vector3cd> v(yy);
        Eigen::Map<Eigen::Vector3cd> d(dy);
        d = m.A * v + m.b;
    };
    auto obs = [&](std::size_t k, double, const cd* yy) { out[k] = yy[2].real(); };
    integrate(rhs, 3, y.data(), grid, {}, ic, obs);
    return out;
}

RunOutput jc_sigmaz_run(const ScenarioConfig& cfg, const JCParams& p, const std::string& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = cfg.grid();
    RunOutput out;
    const auto q = HilbertSpace({2});
    const std::vector<NamedOperator> obs{{"sigmaz", jc_sigma_z()}};
    if (rep == "exact") {
        int n = cfg.exact_n_max > 0 ? cfg.exact_n_max : 4;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const JCExactModel ex = jc_exact_model(p, n, Frame::displaced);
            const auto tr = evolve(ex.model, ex.ground_state(), grid, cfg.integrator,
                                   {{"sigmaz", ex.sigma_z}, {"top", ex.top_projector}});
            out.worst.merge_worst(tr.worst);
            out.leak = max_real(tr.series("top"));
            out.notes.push_back("exact n_max = " + std::to_string(n) + ", leak = " + format_number(out.leak));
            out.curves = {{"exact_sigmaz", tr.real_series("sigmaz")}};
            if (out.leak <= kLeakLimit) break;
            out.leak_flagged = true;
            if (attempt == 1) out.leak_unresolved = true;
            n += 2;
        }
    } else if (rep == "adb" || rep == "pdb-lme") {
        const EffectiveModel em = rep == "adb" ? jc_adb_lindblad(p) : jc_pdb_lindblad(p);
        const auto tr = evolve(em.model, DensityMatrix::basis_state(q, 0), grid, cfg.integrator, obs);
        out.worst.merge_worst(tr.worst);
        out.curves = {{rep + "_sigmaz", tr.real_series("sigmaz")}};
    } else if (rep == "pdb") {
        out.curves = {{"pdb_sigmaz", moment_sigmaz(p, grid, cfg.integrator)}};
    }
    out.seconds = seconds_since(t0);
    return out;
}

// ---- jc-g2 ---------------------------------------------------------------

RunOutput jc_g2_run(const ScenarioConfig& cfg, const std::string& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = cfg.grid();
    const JCParams& p = cfg.jc;
    RunOutput out;
    if (rep == "exact") {
        int n = cfg.exact_n_max > 0 ? cfg.exact_n_max : 4;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const JCExactModel ex = jc_exact_model(p, n, Frame::displaced);
            const DensityMatrix rho = steady_state(ex.model.liouvillian(0.0));
            out.worst.merge_worst(rho.invariants());
            out.leak = expectation(ex.top_projector, rho).real();
            out.notes.push_back("exact n_max = " + std::to_string(n) + ", leak = " + format_number(out.leak));
            if (out.leak <= kLeakLimit || attempt == 1) {
                out.curves = {{"exact_g2", g2_curve(ex.model, ex.photon, grid)}};
                if (out.leak > kLeakLimit) out.leak_unresolved = true;
                break;
            }
            out.leak_flagged = true;
            n += 2;
        }
    } else if (rep == "adb") {
        out.curves = {{"adb_g2", effective_g2(p, ModelChoice::adb, false, grid)}};
    } else if (rep == "pdb") {
        out.curves = {{"pdb_g2", effective_g2(p, ModelChoice::pdb, true, grid)}};
    } else if (rep == "pdb-lme") {
        out.curves = {{"pdb-lme_g2", effective_g2(p, ModelChoice::pdb, false, grid)}};
    } else if (rep == "analytic") {
        JCParams r = p;
        r.delta = r.omega = 0.0;
        out.curves = {{"analytic_g2", g2_pdb_analytic(r, grid, true)}, {"analytic-nonoise_g2", g2_pdb_analytic(r, grid, false)}};
    } else if (rep == "pdbres") {
        JCParams r = p;
        r.delta = r.omega = 0.0;
        out.curves = {{"pdbres_g2", effective_g2(r, ModelChoice::pdb, true, grid)}};
    }
    out.seconds = seconds_since(t0);
    return out;
}

// ---- stirap --------------------------------------------------------------

MomentVector initial_moments(int level) {
    MomentVector y = MomentVector::Zero();
    if (level == 1) y(0) = 1.0;
    if (level == 2) y(1) = 1.0;
    return y;
}

std::vector<double> overlap_column(const std::vector<std::optional<double>>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? *v[i] : std::nan("");
    return out;
}

RunOutput stirap_run(const ScenarioConfig& cfg, const std::string& rep, const std::vector<double>& FH,
                     const std::vector<double>& FV) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = cfg.grid();
    const LambdaParams& p = cfg.lambda;
    RunOutput out;
    auto add_pops = [&](const std::string& r, std::array<std::vector<double>, 3> P) {
        for (int k = 0; k < 3; ++k) out.curves.push_back({r + "_P" + std::to_string(k + 1), std::move(P[k])});
    };
    if (rep == "exact") {
        int n = cfg.exact_n_max > 0 ? cfg.exact_n_max : 2;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const StirapExactModel ex = stirap_full_model(p, n, Frame::displaced);
            const auto tr = evolve(ex.model, ex.initial_state(cfg.initial_level), grid, cfg.integrator, ex.observables());
            out.worst.merge_worst(tr.worst);
            out.leak = std::max(max_real(tr.series("top_H")), max_real(tr.series("top_V")));
            out.notes.push_back("exact n_max = " + std::to_string(n) + " (dimension " +
                                std::to_string(ex.model.space().dim()) + "), leak = " + format_number(out.leak));
            out.curves.clear();
            add_pops("exact", {tr.real_series("P1"), tr.real_series("P2"), tr.real_series("P3")});
            if (out.leak <= kLeakLimit) break;
            out.leak_flagged = true;
            if (attempt == 1) out.leak_unresolved = true;
            n += 1;
        }
    } else if (rep == "adb" || rep == "pdb") {
        const auto gen = rep == "adb" ? stirap_adb_generator(p) : stirap_pdb_generator(p);
        const auto tr = evolve_moments(gen, initial_moments(cfg.initial_level), grid, cfg.integrator);
        add_pops(rep, tr.populations());
        if (rep == "pdb") {
            std::vector<Mat> rhos;
            for (const auto& y : tr.y) rhos.push_back(density_from_moments(y));
            out.curves.push_back({"overlap-pdb", overlap_column(dark_state_overlap(rhos, FH, FV))});
        }
    } else if (rep == "pdb-lme") {
        const auto em = stirap_pdb_lindblad(p);
        EvolveOptions opts;
        opts.keep_snapshots = true;
        const HilbertSpace s3({3});
        const std::vector<NamedOperator> obs{{"P1", lambda_transition(1, 1)},
                                             {"P2", lambda_transition(2, 2)},
                                             {"P3", lambda_transition(3, 3)}};
        const auto tr = evolve(em.model, DensityMatrix::basis_state(s3, cfg.initial_level - 1), grid, cfg.integrator,
                               obs, opts);
        out.worst.merge_worst(tr.worst);
        add_pops("pdb-lme", {tr.real_series("P1"), tr.real_series("P2"), tr.real_series("P3")});
        out.curves.push_back({"overlap-pdb-lme", overlap_column(dark_state_overlap(tr.snapshots, FH, FV))});
    }
    out.seconds = seconds_since(t0);
    return out;
}

// ---- output --------------------------------------------------------------

std::string header_block(const ScenarioConfig& cfg) {
    std::string h = std::string("# prodiab ") + PRODIAB_VERSION + "\n";
    for (const auto& [k, v] : cfg.resolved) h += "# " + k + " = " + v + "\n";
    return h;
}

void write_csv(const std::string& path, const ScenarioConfig& cfg, const CurveSet& cs) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << header_block(cfg);
    out << "t_kappa";
    for (const auto& n : cs.names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < cs.t.size(); ++i) {
        out << format_number(cs.t[i]);
        for (const auto& v : cs.values) out << "," << format_number(v[i]);
        out << "\n";
    }
}

void write_report(const std::string& path, const ScenarioConfig& cfg, const std::vector<ComparisonReport>& reports) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << header_block(cfg);
    for (const auto& r : reports) {
        out << "\n[" << r.family << "]\n";
        out << "epsilon.worst_eps = " << format_number(r.eps.worst_eps) << "\n";
        out << "epsilon.warning = " << (r.eps.warning ? "true" : "false") << "\n";
        for (const auto& [k, v] : r.eps.eps_sq_candidates) out << "epsilon.order2." << k << " = " << format_number(v) << "\n";
        for (const auto& [k, v] : r.eps.eps_candidates) out << "epsilon.order1." << k << " = " << format_number(v) << "\n";
        out << "leak.max = " << format_number(r.leak_max) << "\n";
        out << "leak.flagged = " << (r.leak_flagged ? "true" : "false") << "\n";
        out << "invariants.hermiticity = " << format_number(r.worst.hermiticity) << "\n";
        out << "invariants.trace_error = " << format_number(r.worst.trace_error) << "\n";
        out << "invariants.min_eigenvalue = " << format_number(r.worst.min_eigenvalue) << "\n";
        for (const auto& p : r.pairs)
            out << "pair " << p.a << " vs " << p.b << ": max_abs = " << format_number(p.max_abs)
                << ", l2 = " << format_number(p.l2) << ", t_at_max = " << format_number(p.t_at_max) << "\n";
        for (const auto& n : r.notes) out << "note: " << n << "\n";
    }
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("PRODIAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return unsigned(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> ScenarioConfig::grid() const {
    std::vector<double> g(grid_points);
    for (int i = 0; i < grid_points; ++i)
        g[i] = grid_start + (grid_end - grid_start) * double(i) / double(grid_points - 1);
    g.back() = grid_end;
    return g;
}

ScenarioConfig ScenarioConfig::from_config(const Config& c) {
    for (const auto& [k, e] : c.entries())
        if (!known_keys().count(k)) throw ConfigError("unknown key '" + k + "'", e.line);

    ScenarioConfig s;
    if (!c.has("scenario")) throw ConfigError("missing required key 'scenario'");
    s.name = c.get_string("scenario", "");
    if (s.name == "jc-sigmaz")
        s.kind = ScenarioKind::jc_sigmaz;
    else if (s.name == "jc-g2")
        s.kind = ScenarioKind::jc_g2;
    else if (s.name == "stirap")
        s.kind = ScenarioKind::stirap;
    else
        throw ConfigError("unknown scenario '" + s.name + "'", c.line_of("scenario"));

    s.representations = c.get_strings("representations", kAllReps);
    if (s.representations.empty())
        throw ConfigError("at least one representation is required", c.line_of("representations"));
    for (const auto& r : s.representations)
        if (std::find(kAllReps.begin(), kAllReps.end(), r) == kAllReps.end())
            throw ConfigError("unknown representation '" + r + "'", c.line_of("representations"));
    std::vector<std::string> ordered;
    for (const auto& r : kAllReps)
        if (std::find(s.representations.begin(), s.representations.end(), r) != s.representations.end())
            ordered.push_back(r);
    s.representations = ordered;

    const double def_end = s.kind == ScenarioKind::jc_sigmaz ? 300.0 : s.kind == ScenarioKind::jc_g2 ? 60.0 : 100.0;
    const int def_pts = s.kind == ScenarioKind::jc_sigmaz ? 601 : s.kind == ScenarioKind::jc_g2 ? 241 : 401;
    s.grid_start = c.get_double("grid.start", 0.0);
    s.grid_end = c.get_double("grid.end", def_end);
    s.grid_points = c.get_int("grid.points", def_pts);
    if (!(s.grid_end > s.grid_start)) throw ConfigError("grid.end must exceed grid.start", c.line_of("grid.end"));
    if (s.grid_points < 2) throw ConfigError("grid.points must be at least 2", c.line_of("grid.points"));
    if (s.grid_start < 0.0) throw ConfigError("grid.start must be nonnegative", c.line_of("grid.start"));

    s.jc.kappa = 1.0;
    s.jc.g = c.get_double("jc.g_over_kappa", 0.15);
    s.jc.gamma = c.get_double("jc.gamma_over_kappa", 5e-3);
    s.jc.omega = c.get_double("jc.omega_over_kappa", 5e-4);
    s.jc.delta = c.get_double("jc.delta_over_kappa", 0.05);
    s.jc.f = c.get_double("jc.f_over_kappa", 2.5e-4);
    s.drives = c.get_doubles("jc.drives", {0.005, 0.01, 0.02, 0.04});
    try {
        s.jc.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), c.line_of("jc.gamma_over_kappa"));
    }
    if (s.kind == ScenarioKind::jc_sigmaz && s.drives.empty())
        throw ConfigError("jc.drives must list at least one drive", c.line_of("jc.drives"));

    s.lambda.kappa = 1.0;
    s.lambda.g = c.get_double("stirap.g_over_kappa", 0.1);
    s.lambda.gamma = c.get_double("stirap.gamma_over_kappa", 5e-4);
    s.lambda.env_H = read_envelope(c, "H", PulseEnvelope::boxcar(45.0, 10.0, 1.0));
    s.lambda.env_V = read_envelope(c, "V", PulseEnvelope::boxcar(55.0, 10.0, 1.0));
    s.initial_level = c.get_int("stirap.initial_level", 1);
    if (s.initial_level < 1 || s.initial_level > 3)
        throw ConfigError("stirap.initial_level must be 1, 2 or 3", c.line_of("stirap.initial_level"));
    try {
        s.lambda.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), c.line_of("stirap.gamma_over_kappa"));
    }

    s.integrator.rel_tol = c.get_double("integrator.rel_tol", 1e-9);
    s.integrator.abs_tol = c.get_double("integrator.abs_tol", 1e-12);
    s.integrator.max_step = c.get_double("integrator.max_step", 0.1);
    try {
        s.integrator.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), c.line_of("integrator.rel_tol"));
    }
    s.exact_n_max = c.get_int("exact.n_max", 0);
    if (s.exact_n_max < 0) throw ConfigError("exact.n_max must be nonnegative", c.line_of("exact.n_max"));
    s.output_dir = c.get_string("output.dir", "out/" + s.name);

    auto& r = s.resolved;
    auto put = [&](const std::string& k, const std::string& v) { r.emplace_back(k, v); };
    auto num = [&](const std::string& k, double v) { put(k, format_number(v)); };
    put("scenario", s.name);
    std::string reps;
    for (const auto& x : s.representations) reps += (reps.empty() ? "" : ", ") + x;
    put("representations", reps);
    num("grid.start", s.grid_start);
    num("grid.end", s.grid_end);
    put("grid.points", std::to_string(s.grid_points));
    if (s.kind == ScenarioKind::stirap) {
        num("stirap.g_over_kappa", s.lambda.g);
        num("stirap.gamma_over_kappa", s.lambda.gamma);
        for (const auto& [m, e] : {std::pair{"H", s.lambda.env_H}, {"V", s.lambda.env_V}}) {
            const std::string pre = std::string("stirap.env_") + m + ".";
            put(pre + "kind", envelope_kind(e));
            num(pre + "amp", e.amp);
            if (e.kind != PulseEnvelope::Kind::constant) num(pre + "center", e.center);
            if (e.kind == PulseEnvelope::Kind::boxcar) num(pre + "halfwidth", e.halfwidth);
            if (e.kind == PulseEnvelope::Kind::gaussian) num(pre + "width", e.width);
        }
        put("stirap.initial_level", std::to_string(s.initial_level));
    } else {
        num("jc.g_over_kappa", s.jc.g);
        num("jc.gamma_over_kappa", s.jc.gamma);
        num("jc.omega_over_kappa", s.jc.omega);
        num("jc.delta_over_kappa", s.jc.delta);
        if (s.kind == ScenarioKind::jc_g2) {
            num("jc.f_over_kappa", s.jc.f);
        } else {
            std::string d;
            for (double x : s.drives) d += (d.empty() ? "" : ", ") + format_number(x);
            put("jc.drives", d + (c.has("jc.drives") ? "" : "  (default sweep)"));
        }
    }
    num("integrator.rel_tol", s.integrator.rel_tol);
    num("integrator.abs_tol", s.integrator.abs_tol);
    num("integrator.max_step", s.integrator.max_step);
    put("exact.n_max", s.exact_n_max > 0 ? std::to_string(s.exact_n_max) : "auto");
    std::sort(r.begin(), r.end());
    return s;
}

const CurveSet& ScenarioResult::family(const std::string& name) const {
    for (const auto& [n, c] : families)
        if (n == name) return c;
    throw DomainError("ScenarioResult: no family " + name);
}

const ComparisonReport& ScenarioResult::report(const std::string& name) const {
    for (const auto& r : reports)
        if (r.family == name) return r;
    throw DomainError("ScenarioResult: no report " + name);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, bool write_files) {
    ScenarioResult res;
    const auto grid = cfg.grid();

    // family name, report?, run outputs
    struct Family {
        std::string name;
        EpsilonReport eps;
        std::vector<RunOutput> runs;
        std::vector<std::pair<std::string, std::vector<double>>> extra;  // not compared
    };
    std::vector<Family> fams;
    std::vector<std::function<void()>> tasks;

    if (cfg.kind == ScenarioKind::jc_sigmaz) {
        fams.resize(cfg.drives.size());
        for (std::size_t i = 0; i < cfg.drives.size(); ++i) {
            JCParams p = cfg.jc;
            p.f = cfg.drives[i];
            fams[i].name = "sigmaz_f" + format_number(p.f);
            fams[i].eps = epsilon_report(p);
            fams[i].runs.resize(cfg.representations.size());
            for (std::size_t j = 0; j < cfg.representations.size(); ++j)
                tasks.push_back([&, p, i, j] { fams[i].runs[j] = jc_sigmaz_run(cfg, p, cfg.representations[j]); });
        }
    } else if (cfg.kind == ScenarioKind::jc_g2) {
        fams.resize(1);
        fams[0].name = "g2";
        fams[0].eps = epsilon_report(cfg.jc);
        std::vector<std::string> reps = cfg.representations;
        reps.push_back("analytic");
        if (!cfg.jc.resonant()) reps.push_back("pdbres");
        fams[0].runs.resize(reps.size());
        for (std::size_t j = 0; j < reps.size(); ++j)
            tasks.push_back([&, reps, j] { fams[0].runs[j] = jc_g2_run(cfg, reps[j]); });
    } else {
        fams.resize(1);
        fams[0].name = "populations";
        fams[0].eps = epsilon_report(cfg.lambda);
        const auto [FH, FV] = filtered_envelopes(cfg.lambda, grid);
        std::vector<double> fH(grid.size()), fV(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            fH[i] = envelope_eval(cfg.lambda.env_H, grid[i]);
            fV[i] = envelope_eval(cfg.lambda.env_V, grid[i]);
        }
        fams[0].extra = {{"fH", fH}, {"fV", fV}, {"FH", FH}, {"FV", FV},
                         {"adiabaticity", overlap_column(adiabaticity_metric(FH, FV, grid))}};
        fams[0].runs.resize(cfg.representations.size());
        for (std::size_t j = 0; j < cfg.representations.size(); ++j)
            tasks.push_back([&, FH = FH, FV = FV, j] { fams[0].runs[j] = stirap_run(cfg, cfg.representations[j], FH, FV); });
    }
    run_parallel(tasks);

    for (auto& f : fams) {
        CurveSet compared, all;
        compared.t = grid;
        all.t = grid;
        ComparisonReport rep;
        double secs = 0.0;
        for (auto& r : f.runs) {
            for (auto& [n, v] : r.curves) {
                const bool diagnostic = n.rfind("overlap", 0) == 0;
                if (!diagnostic) compared.add(n, v);
                all.add(n, v);
            }
            rep.worst.merge_worst(r.worst);
            rep.leak_max = std::max(rep.leak_max, r.leak);
            rep.leak_flagged = rep.leak_flagged || r.leak_flagged;
            if (r.leak_unresolved) res.exit_code = 4;
            rep.notes.insert(rep.notes.end(), r.notes.begin(), r.notes.end());
            secs += r.seconds;
        }
        for (auto& [n, v] : f.extra) all.add("drive-" + n, v);
        ComparisonReport cmp = compare(compared);
        rep.pairs = cmp.pairs;
        rep.family = f.name;
        rep.eps = f.eps;
        rep.wall_seconds = secs;
        if (rep.eps.warning)
            rep.notes.push_back("worst_eps = " + format_number(rep.eps.worst_eps) +
                                " exceeds 0.3: outside the small-epsilon regime");
        res.reports.push_back(std::move(rep));
        res.families.emplace_back(f.name, std::move(all));
    }

    if (write_files) {
        std::filesystem::create_directories(cfg.output_dir);
        for (const auto& [name, cs] : res.families) {
            const std::string path = cfg.output_dir + "/" + name + ".csv";
            write_csv(path, cfg, cs);
            res.files.push_back(path);
        }
        const std::string rpath = cfg.output_dir + "/report.txt";
        write_report(rpath, cfg, res.reports);
        res.files.push_back(rpath);
        const std::string tpath = cfg.output_dir + "/timing.txt";
        std::ofstream t(tpath);
        for (const auto& r : res.reports) t << r.family << " wall_seconds = " << format_number(r.wall_seconds) << "\n";
        res.files.push_back(tpath);
    }
    return res;
}

}  // namespace prodiab::harness
