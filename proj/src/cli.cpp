#include "resonance/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "resonance/resonance.hpp"

extern char** environ;

namespace resonance::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

const json& require(const json& node, const std::string& key, const std::string& path)
{
    if (!node.is_object() || !node.contains(key))
        throw Error(ErrorKind::validation, "missing required field", join(path, key));
    return node.at(key);
}

double as_number(const json& v, const std::string& path)
{
    if (!v.is_number()) throw Error(ErrorKind::validation, "expected a number", path);
    return v.get<double>();
}

double number(const json& node, const std::string& key, const std::string& path)
{
    return as_number(require(node, key, path), join(path, key));
}

double number_or(const json& node, const std::string& key, const std::string& path, double fallback)
{
    if (!node.is_object() || !node.contains(key)) return fallback;
    return as_number(node.at(key), join(path, key));
}

cplx as_complex(const json& v, const std::string& path)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw Error(ErrorKind::validation, "expected a number or [re, im]", path);
}

std::vector<double> as_reals(const json& v, const std::string& path)
{
    if (!v.is_array()) throw Error(ErrorKind::validation, "expected an array of numbers", path);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

CMatrix as_matrix(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) throw Error(ErrorKind::validation, "expected a matrix (array of rows)", path);
    const std::size_t n = v.size();
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    CMatrix m(n, cols);
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_array() || v[i].size() != cols) throw Error(ErrorKind::validation, "ragged matrix", path);
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = as_complex(v[i][j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return m;
}

json complex_json(cplx z) { return json::array({std::real(z), std::imag(z)}); }

json vector_json(const CVector& v)
{
    json a = json::array();
    for (const auto& z : v) a.push_back(complex_json(z));
    return a;
}

json matrix_json(const CMatrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(complex_json(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

json ext_json(const ExtReal& x)
{
    if (x.is_finite()) return x.value;
    if (x.is_infinite()) return "inf";
    return nullptr;
}

FormFactor parse_form_factor(const json& root)
{
    const std::string path = "form_factor";
    const json& f = require(root, "form_factor", "");
    const json& fam = require(f, "family", path);
    if (!fam.is_string()) throw Error(ErrorKind::validation, "family must be a string", "form_factor.family");
    const int d = static_cast<int>(number_or(f, "dimension", path, 3));
    const double g1 = number_or(f, "angular", path, 1.0);
    if (fam == "power_exp") {
        const double m = number(f, "m", path);
        if (m != 1.0 && m != 2.0) throw Error(ErrorKind::validation, "m must be 1 or 2", "form_factor.m");
        return FormFactor::power_exp(number(f, "p", path), static_cast<int>(m), number_or(f, "amplitude", path, 1.0), d, g1);
    }
    if (fam == "tabulated")
        return FormFactor::tabulated(as_reals(require(f, "r", path), "form_factor.r"),
                                     as_reals(require(f, "g", path), "form_factor.g"), d, g1);
    throw Error(ErrorKind::validation, "unknown form factor family", "form_factor.family");
}

ThermalConfig parse_thermal(const json& root)
{
    const json& t = require(root, "thermal", "");
    ThermalConfig cfg;
    cfg.beta = number(t, "beta", "thermal");
    cfg.lambda = number(t, "lambda", "thermal");
    cfg.omega_prime = number_or(t, "omega_prime", "thermal", 0.5 * pi / cfg.beta);
    cfg.validate();
    return cfg;
}

SystemSpec parse_system(const json& root)
{
    const json& s = require(root, "system", "");
    if (s.contains("qubit")) {
        const json& q = s.at("qubit");
        return qubit(number(q, "Delta", "system.qubit"), number(q, "a", "system.qubit"), number(q, "b", "system.qubit"),
                     as_complex(require(q, "c", "system.qubit"), "system.qubit.c"));
    }
    if (s.contains("spin_boson")) {
        const json& q = s.at("spin_boson");
        const auto p = spin_boson_map(number(q, "epsilon", "system.spin_boson"), number(q, "delta0", "system.spin_boson"));
        return qubit(p.Delta, p.a, p.b, p.c);
    }
    const auto energies = as_reals(require(s, "energies", "system"), "system.energies");
    CMatrix g;
    if (s.contains("gammas")) {
        const auto gam = as_reals(s.at("gammas"), "system.gammas");
        g = CMatrix(gam.size(), gam.size());
        for (std::size_t i = 0; i < gam.size(); ++i) g(i, i) = gam[i];
    } else {
        g = as_matrix(require(s, "coupling", "system"), "system.coupling");
    }
    return SystemSpec(energies, g);
}

std::vector<double> parse_times(const json& task, std::vector<double> fallback)
{
    if (!task.contains("times")) {
        if (fallback.empty()) throw Error(ErrorKind::validation, "missing required field", "task.times");
        return fallback;
    }
    const json& t = task.at("times");
    std::vector<double> out;
    if (t.is_array()) {
        out = as_reals(t, "task.times");
    } else {
        const double a = number(t, "start", "task.times"), b = number(t, "stop", "task.times");
        const double c = number(t, "count", "task.times");
        if (!(c >= 1.0) || c != std::floor(c)) throw Error(ErrorKind::validation, "count must be a positive integer", "task.times.count");
        const auto n = static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
    }
    for (double x : out)
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorKind::validation, "times must be finite and nonnegative", "task.times");
    return out;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
    return out;
}

DensityMatrix parse_state(const json& v, const std::string& path, const SystemSpec& sys, double beta)
{
    if (v.is_string()) {
        if (v == "gibbs") return gibbs_reduced(sys, beta);
        throw Error(ErrorKind::validation, "unknown named state", path);
    }
    if (v.is_object() && v.contains("pure")) {
        const json& p = v.at("pure");
        if (!p.is_array()) throw Error(ErrorKind::validation, "pure state must be an array", path + ".pure");
        CVector psi;
        for (std::size_t i = 0; i < p.size(); ++i) psi.push_back(as_complex(p[i], path + ".pure"));
        const double nv = norm(psi);
        if (nv == 0.0) throw Error(ErrorKind::invalid_state, "pure state must be nonzero", path + ".pure");
        CMatrix rho(psi.size(), psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
            for (std::size_t j = 0; j < psi.size(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]) / (nv * nv);
        return DensityMatrix(rho);
    }
    try {
        return DensityMatrix(as_matrix(v, path));
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), path);
    }
}

struct Context {
    json config;
    std::string out_dir;
    std::string prefix;
    bool verbose = false;
    std::ostream* log = nullptr;

    void note(const std::string& msg) const
    {
        if (verbose) *log << msg << '\n';
    }
    std::string path(const std::string& ext) const
    {
        return (std::filesystem::path(out_dir) / (prefix + "." + ext)).string();
    }
};

json resonance_json(const ResonanceSet& res)
{
    json a = json::array();
    for (const auto& r : res.items)
        a.push_back({{"e", r.e},
                     {"s", r.s + 1},
                     {"delta", complex_json(r.delta)},
                     {"epsilon", complex_json(r.epsilon)},
                     {"pinned", r.pinned},
                     {"eta", vector_json(r.eta)},
                     {"eta_tilde", vector_json(r.eta_tilde)}});
    return a;
}

json rates_json(const Rates& r)
{
    json per = json::array();
    for (const auto& [e, tau] : r.decay_times) per.push_back({{"e", e}, {"tau", ext_json(tau)}});
    return {{"tau_T", ext_json(r.tau_T)}, {"tau_D", ext_json(r.tau_D)}, {"ratio", ext_json(r.ratio)}, {"decay_times", per}};
}

void emit_json(const Context& ctx, const json& j)
{
    write_atomic(ctx.path("json"), j.dump(2) + "\n");
    ctx.note("wrote " + ctx.path("json"));
}

void emit_csv(const Context& ctx, const Trajectory& traj)
{
    write_atomic(ctx.path("csv"), trajectory_csv(traj));
    ctx.note("wrote " + ctx.path("csv"));
}

json base_report(const std::string& task, const ResonanceSet& res)
{
    json j = {{"task", task}, {"resonances", resonance_json(res)}, {"min_pairing", res.min_pairing}};
    j["warnings"] = res.warnings;
    return j;
}

void task_rates(const Context& ctx)
{
    const auto sys = parse_system(ctx.config);
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    CorrelationSet corr(g, cfg.beta);
    const auto res = resonances(sys, corr, cfg.lambda);
    json j = base_report("rates", res);
    j["rates"] = rates_json(rates(res));
    emit_json(ctx, j);
}

void task_spectrum(const Context& ctx)
{
    const auto sys = parse_system(ctx.config);
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    CorrelationSet corr(g, cfg.beta);
    const auto bohr = bohr_frequencies(sys);
    const auto lsos = level_shifts(sys, corr, bohr);
    const auto res = resonance_energies(sys, lsos, cfg.lambda, {1.0, cfg.beta});
    json ops = json::array();
    for (const auto& L : lsos) {
        json pairs = json::array();
        for (const auto& [m, n] : L.bohr.pairs) pairs.push_back({m + 1, n + 1});
        ops.push_back({{"e", L.bohr.e},
                       {"pairs", pairs},
                       {"matrix", matrix_json(L.matrix)},
                       {"diagonal", matrix_json(L.diagonal)},
                       {"off_diagonal", matrix_json(L.off_diagonal)},
                       {"mixed", matrix_json(L.mixed)}});
    }
    json j = base_report("spectrum", res);
    j["level_shift_operators"] = ops;
    const auto an = analyticity_check(g, cfg);
    j["analyticity"] = {{"status", to_string(an.status)}, {"reasons", an.reasons}};
    emit_json(ctx, j);
}

void task_evolve(const Context& ctx)
{
    const auto sys = parse_system(ctx.config);
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    const json& task = ctx.config.at("task");
    const auto times = parse_times(task, {});
    const auto rho0 = parse_state(require(task, "initial_state", "task"), "task.initial_state", sys, cfg.beta);
    CorrelationSet corr(g, cfg.beta);
    const auto res = resonances(sys, corr, cfg.lambda);
    const auto traj = reduced_density_trajectory(rho0, times, res, sys, cfg);
    emit_csv(ctx, traj);
    json j = base_report("evolve", res);
    j["rates"] = rates_json(traj.rates);
    j["amplitude_bound"] = traj.amplitude_bound;
    j["remainder_envelope"] = traj.envelope;
    emit_json(ctx, j);
}

void task_dephasing_compare(const Context& ctx)
{
    const auto sys = parse_system(ctx.config);
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    const std::size_t n = sys.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (i != k && sys.coupling()(i, k) != cplx(0.0))
                throw Error(ErrorKind::validation, "dephasing comparison needs a diagonal coupling", "system.coupling");
    DephasingModel model{{}, sys.energies(), g, cfg.beta, cfg.lambda};
    for (std::size_t i = 0; i < n; ++i) model.gammas.push_back(std::real(sys.coupling()(i, i)));

    CorrelationSet corr(g, cfg.beta);
    const auto res = resonances(sys, corr, cfg.lambda);
    double slowest = 0.0;
    for (const auto& r : res.items) {
        const double rate = std::abs(cfg.lambda * cfg.lambda * r.delta);
        if (rate > 0.0 && (slowest == 0.0 || rate < slowest)) slowest = rate;
    }
    const json& task = ctx.config.at("task");
    const auto times = parse_times(task, linspace(0.0, slowest > 0.0 ? 10.0 / slowest : 100.0, 41));
    const auto rho0 = parse_state(require(task, "initial_state", "task"), "task.initial_state", sys, cfg.beta);
    const auto exact = exact_trajectory(model, rho0, times);
    const auto predicted = reduced_density_trajectory(rho0, times, res, sys, cfg);

    json rows = json::array();
    double worst = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                const cplx ex = exact.rho[ti](a, b), pr = predicted.rho[ti](a, b);
                const double dev = std::abs(ex) > 0.0 ? std::abs(pr / ex - 1.0) : std::abs(pr);
                worst = std::max(worst, dev);
                rows.push_back({{"t", times[ti]}, {"entry", {a + 1, b + 1}}, {"exact", complex_json(ex)},
                                {"resonance", complex_json(pr)}, {"deviation", dev}});
            }
    json gens = json::array();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto gen = asymptotic_generator(model, a, b);
            gens.push_back({{"entry", {a + 1, b + 1}}, {"real", gen.real}, {"imag", ext_json(gen.imag)}});
        }
    const auto ginf = gamma_infinity(g, cfg.beta);
    json j = base_report("dephasing-compare", res);
    j["model"] = {{"energies", model.energies}, {"gammas", model.gammas}, {"beta", cfg.beta}, {"lambda", cfg.lambda}};
    j["comparison"] = rows;
    j["max_deviation"] = worst;
    j["asymptotic_generators"] = gens;
    j["decoherence"] = model.full_decoherence() ? "full" : "incomplete decoherence";
    j["gamma_infinity"] = {{"value", ext_json(ginf.value)}, {"heuristic", ginf.heuristic}};
    emit_csv(ctx, exact);
    emit_json(ctx, j);
}

void task_equilibrium(const Context& ctx)
{
    const auto sys = parse_system(ctx.config);
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    const auto rep = equilibrium_offdiagonal_qubit(sys, g, cfg.beta, cfg.lambda);
    json j = {{"task", "equilibrium"},
              {"gibbs", matrix_json(rep.gibbs.matrix())},
              {"offdiag12", complex_json(rep.offdiag_12)},
              {"integrals", {{"B1", rep.integral_b1}, {"B2", rep.integral_b2}}}};
    emit_json(ctx, j);
}

void task_register(const Context& ctx)
{
    const json& reg = require(ctx.config, "register", "");
    const auto g = parse_form_factor(ctx.config);
    const auto cfg = parse_thermal(ctx.config);
    const double Lnum = number(reg, "L", "register");
    if (!(Lnum >= 1.0) || Lnum != std::floor(Lnum)) throw Error(ErrorKind::validation, "L must be a positive integer", "register.L");
    const auto L = static_cast<std::size_t>(Lnum);
    const double delta = number(reg, "delta", "register");
    const CMatrix G = as_matrix(require(reg, "G", "register"), "register.G");
    if (G.rows() != 2 || G.cols() != 2) throw Error(ErrorKind::validation, "G must be 2x2", "register.G");
    const json& mode = require(reg, "mode", "register");
    CorrelationSet corr(g, cfg.beta);
    const SystemSpec q(std::vector<double>{0.0, delta}, G);

    if (mode == "collective") {
        const auto sys = collective_system(L, delta, G);
        const auto rep = coherent_subspace_report(sys, corr, number_or(reg, "threshold", "register", 1e-10));
        json dirs = json::array();
        for (const auto& d : rep.directions) {
            json support = json::array();
            for (const auto& [m, n, v] : d.support) support.push_back({{"m", m}, {"n", n}, {"coefficient", complex_json(v)}});
            dirs.push_back({{"e", d.e}, {"s", d.s + 1}, {"delta", complex_json(d.delta)}, {"coherent", d.coherent},
                            {"support", support}});
        }
        emit_json(ctx, {{"task", "register"}, {"mode", "collective"}, {"L", L}, {"threshold", rep.threshold},
                        {"directions", dirs}});
        return;
    }
    if (mode != "independent") throw Error(ErrorKind::validation, "mode must be independent or collective", "register.mode");
    const json& task = ctx.config.at("task");
    const auto times = parse_times(task, {});
    std::vector<DensityMatrix> states;
    const json& init = require(task, "initial_state", "task");
    for (std::size_t j = 0; j < L; ++j) {
        const json& s = init.is_array() && init.size() == L && !init[0].is_number() && init[0].is_array() &&
                                init[0].size() == 2 && init[0][0].is_array() && init[0][0].size() == 2 &&
                                !init[0][0][0].is_number()
                            ? init[j]
                            : init;
        states.push_back(parse_state(s, "task.initial_state", q, cfg.beta));
    }
    const auto traj = independent_register_trajectory(std::vector<SystemSpec>(L, q), states, times, corr, cfg);
    const std::size_t cap = static_cast<std::size_t>(number_or(reg, "dense_cap", "register", default_dense_cap));
    Trajectory dense;
    dense.n = std::size_t{1} << L;
    dense.times = times;
    for (std::size_t ti = 0; ti < times.size(); ++ti) dense.rho.push_back(traj.dense(ti, cap));
    emit_csv(ctx, dense);
    emit_json(ctx, {{"task", "register"}, {"mode", "independent"}, {"L", L}, {"rates", rates_json(traj.qubit(0).rates)}});
}

int fail(std::ostream& err, const Error& e)
{
    json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
    if (!e.field().empty()) j["field"] = e.field();
    if (auto* q = dynamic_cast<const QuadratureError*>(&e)) j["achieved_error"] = q->achieved_error();
    err << j.dump() << '\n';
    return is_numerical(e.kind()) ? 3 : 2;
}

}  // namespace

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trajectory_csv(const Trajectory& traj)
{
    std::string out = "t";
    const std::size_t n = traj.n;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            const std::string idx = std::to_string(m + 1) + "_" + std::to_string(k + 1);
            out += ",re_rho_" + idx + ",im_rho_" + idx;
        }
    out += '\n';
    for (std::size_t ti = 0; ti < traj.times.size(); ++ti) {
        out += format_double(traj.times[ti]);
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = 0; k < n; ++k) {
                out += ',' + format_double(std::real(traj.rho[ti](m, k)));
                out += ',' + format_double(std::imag(traj.rho[ti](m, k)));
            }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::io, "cannot open " + tmp.string() + " for writing", "output.dir");
        f << content;
        f.flush();
        if (!f) throw Error(ErrorKind::io, "write failed for " + tmp.string(), "output.dir");
    }
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::io, "cannot rename " + tmp.string() + " to " + path + ": " + ec.message(), "output.dir");
}

void apply_env_overrides(json& config, const std::map<std::string, std::string>& env)
{
    const std::string prefix = "RESONANCE_";
    for (const auto& [key, value] : env) {
        if (key.rfind(prefix, 0) != 0) continue;
        std::vector<std::string> parts;
        std::string rest = key.substr(prefix.size());
        for (std::size_t pos; (pos = rest.find("__")) != std::string::npos; rest = rest.substr(pos + 2))
            parts.push_back(rest.substr(0, pos));
        parts.push_back(rest);
        json* node = &config;
        for (auto& p : parts) {
            for (auto& c : p) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (!node->is_object()) *node = json::object();
            node = &(*node)[p];
        }
        json parsed = json::parse(value, nullptr, false);
        *node = parsed.is_discarded() ? json(value) : parsed;
    }
}

std::map<std::string, std::string> environment()
{
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        const std::string kv(*e);
        const auto eq = kv.find('=');
        if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return env;
}

int run(const Options& opt, const std::map<std::string, std::string>& env, std::ostream& log, std::ostream& err)
{
    try {
        std::ifstream in(opt.config);
        if (!in) throw Error(ErrorKind::io, "cannot read config " + opt.config, "config");
        json config = json::parse(in, nullptr, false);
        if (config.is_discarded() || !config.is_object())
            throw Error(ErrorKind::validation, "config is not a JSON object", "config");
        apply_env_overrides(config, env);
        if (opt.threads > 0) set_default_threads(opt.threads);

        Context ctx;
        ctx.config = config;
        ctx.verbose = opt.verbose;
        ctx.log = &log;
        const json output = config.contains("output") ? config.at("output") : json::object();
        ctx.out_dir = !opt.out.empty() ? opt.out : output.value("dir", std::string("."));
        ctx.prefix = output.value("prefix", std::string("result"));

        const json& task = require(config, "task", "");
        const json& type = task.is_string() ? task : require(task, "type", "task");
        if (!type.is_string()) throw Error(ErrorKind::validation, "task type must be a string", "task.type");
        if (task.is_string()) ctx.config["task"] = json{{"type", type}};
        const std::string name = type.get<std::string>();
        ctx.note("task " + name);
        if (name == "rates") task_rates(ctx);
        else if (name == "spectrum") task_spectrum(ctx);
        else if (name == "evolve") task_evolve(ctx);
        else if (name == "dephasing-compare") task_dephasing_compare(ctx);
        else if (name == "equilibrium") task_equilibrium(ctx);
        else if (name == "register") task_register(ctx);
        else throw Error(ErrorKind::validation, "unknown task", "task.type");
        return 0;
    } catch (const Error& e) {
        return fail(err, e);
    } catch (const json::exception& e) {
        return fail(err, Error(ErrorKind::validation, e.what(), "config"));
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Resonance theory of open quantum systems: level shifts, rates and trajectories"};
    Options opt;
    app.add_option("--config", opt.config, "JSON run configuration")->required();
    app.add_option("--out", opt.out, "output directory (overrides output.dir)");
    app.add_option("--threads", opt.threads, "worker threads (0 = hardware concurrency)");
    app.add_flag("--verbose", opt.verbose, "progress messages on stderr");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }
    return run(opt, environment(), std::cerr, std::cerr);
}

}  // namespace resonance::cli
