// Command-line front end: reproducible experiments over the library modules,
// JSON run reports, and CSV parameter grids.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <tentlab/tentlab.hpp>

using namespace tentlab;
using nlohmann::json;

namespace {

// Configuration merging: a --config file provides defaults, flags given on the
// command line override them. The merged object is echoed in the run report,
// so re-running with it as --config reproduces the run.
template <class T>
void put(json& cfg, const CLI::App& app, const std::string& name, const T& v) {
    const CLI::Option* opt = app.get_option_no_throw("--" + name);
    if (opt && opt->count() > 0) cfg[name] = v;
}

template <class T>
T need(const json& cfg, const std::string& name) {
    if (!cfg.contains(name)) throw ContractViolation("missing required option: --" + name);
    return cfg.at(name).get<T>();
}

template <class T>
T get_or(const json& cfg, const std::string& name, T def) {
    return cfg.contains(name) ? cfg.at(name).get<T>() : def;
}

// Function/measure inputs may be a file path or an inline JSON object; the
// echo always stores the resolved object.
json resolve_object(json& cfg, const std::string& key) {
    json j = cfg.at(key);
    if (j.is_string()) j = load_json(j.get<std::string>());
    cfg[key] = j;
    return j;
}

HoloFunction resolve_function(json& cfg, int n, double p, double q, double alpha) {
    if (cfg.contains("function")) return function_from_json(resolve_object(cfg, "function"));
    if (cfg.contains("fa-abs")) {
        const double rho = cfg.at("fa-abs").get<double>();
        const double theta = get_or(cfg, "fa-theta", 1.0);
        cfg["fa-theta"] = theta;
        CVec c(static_cast<std::size_t>(n), 0.0);
        c[0] = rho;
        return HoloFunction::make_fa(BallPoint(std::move(c)), theta, alpha, q, p);
    }
    if (cfg.contains("g-theta")) {
        CVec c(static_cast<std::size_t>(n), 0.0);
        c[0] = 1.0;
        return HoloFunction::make_g(SpherePoint(std::move(c)), cfg.at("g-theta").get<double>());
    }
    throw ContractViolation("provide a function via --function, --fa-abs, or --g-theta");
}

MeasureSpec resolve_measure(json& cfg) {
    if (cfg.contains("measure")) return measure_from_json(resolve_object(cfg, "measure"));
    if (cfg.contains("beta-v"))
        return MeasureSpec::weighted_volume(cfg.at("beta-v").get<double>());
    throw ContractViolation("provide a measure via --measure or --beta-v");
}

int emit_report(const std::string& subcommand, json cfg, json results, double wall_clock_s,
                int code) {
    json report = {{"version", kVersion},
                   {"subcommand", subcommand},
                   {"config", std::move(cfg)},
                   {"results", std::move(results)},
                   {"wall_clock_s", wall_clock_s}};
    std::cout << report.dump(2) << "\n";
    if (report["config"].contains("out") && subcommand != "region")
        save_json(report["config"]["out"].get<std::string>(), report);
    return code;
}

struct VarySpec {
    std::string name;
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
};

VarySpec parse_vary(const std::string& s) {
    // NAME:LO..HI:COUNT
    VarySpec v;
    const auto c1 = s.find(':');
    const auto dd = s.find("..", c1 == std::string::npos ? 0 : c1);
    const auto c2 = s.rfind(':');
    if (c1 == std::string::npos || dd == std::string::npos || c2 == c1)
        throw ContractViolation("--vary expects NAME:LO..HI:COUNT, got '" + s + "'");
    v.name = s.substr(0, c1);
    v.lo = std::stod(s.substr(c1 + 1, dd - c1 - 1));
    v.hi = std::stod(s.substr(dd + 2, c2 - dd - 2));
    const long long cnt = std::stoll(s.substr(c2 + 1));
    if (cnt <= 0) throw ContractViolation("--vary: empty grid in '" + s + "'");
    v.count = static_cast<std::size_t>(cnt);
    return v;
}

std::vector<double> grid_values(const VarySpec& v) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < v.count; ++i)
        xs.push_back(v.count == 1 ? v.lo : v.lo + (v.hi - v.lo) * i / (v.count - 1.0));
    return xs;
}

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tentlab: numerical experiments with tent norms on the unit ball"};
    app.require_subcommand(1);

    std::string config_path, out_path, function_path, measure_path, predicate = "inclusion";
    std::uint64_t seed = 0;
    std::size_t budget = 0, xi_count = 0, sphere_budget = 0;
    double p = 0, q = 0, s = 0, t = 0, alpha = 0, beta = 0, gamma = 0, r = 0;
    double beta_v = 0, fa_abs = 0, fa_theta = 0, g_theta = 0, delta = 0, r_max = 0, rho_cut = 0;
    int n = 0;
    bool quick = false, bergman = false;
    std::vector<double> rhos;
    std::vector<std::string> vary, fixed;
    std::vector<int> criteria_ids;

    auto add_common = [&](CLI::App* sc, bool with_budget = true) {
        sc->add_option("--config", config_path, "JSON file with defaults for any flag");
        sc->add_option("--seed", seed, "RNG seed");
        sc->add_option("--out", out_path, "output path");
        if (with_budget) sc->add_option("--budget", budget, "sampling budget");
    };
    auto add_tent_params = [&](CLI::App* sc) {
        sc->add_option("--p", p);
        sc->add_option("--q", q);
        sc->add_option("--s", s);
        sc->add_option("--t", t);
        sc->add_option("--alpha", alpha);
        sc->add_option("--beta", beta);
        sc->add_option("--n", n);
        sc->add_option("--gamma", gamma);
        sc->add_option("--r", r);
    };
    auto add_inputs = [&](CLI::App* sc) {
        sc->add_option("--function", function_path, "function JSON (file or inline via config)");
        sc->add_option("--measure", measure_path, "measure JSON (file or inline via config)");
        sc->add_option("--beta-v", beta_v, "weighted-volume measure exponent");
        sc->add_option("--fa-abs", fa_abs, "kernel-family function: |a| along the first axis");
        sc->add_option("--fa-theta", fa_theta, "kernel-family exponent theta");
        sc->add_option("--g-theta", g_theta, "boundary-kernel exponent theta");
    };

    auto* sc_norm = app.add_subcommand("norm", "tent norm of a function");
    add_common(sc_norm);
    add_inputs(sc_norm);
    sc_norm->add_option("--p", p);
    sc_norm->add_option("--q", q);
    sc_norm->add_option("--alpha", alpha);
    sc_norm->add_option("--gamma", gamma);
    sc_norm->add_option("--n", n);

    auto* sc_area = app.add_subcommand("area", "area-operator norm of a function");
    add_common(sc_area);
    add_inputs(sc_area);
    sc_area->add_option("--s", s);
    sc_area->add_option("--t", t);
    sc_area->add_option("--alpha", alpha);
    sc_area->add_option("--gamma", gamma);
    sc_area->add_option("--n", n);

    auto* sc_car = app.add_subcommand("carleson", "Carleson statistics of a measure");
    add_common(sc_car);
    add_inputs(sc_car);
    sc_car->add_option("--n", n);
    sc_car->add_option("--xi-count", xi_count);
    sc_car->add_option("--rho-cut", rho_cut);

    auto* sc_embed = app.add_subcommand("embed-check", "embedding verdict for a measure");
    add_common(sc_embed);
    add_inputs(sc_embed);
    add_tent_params(sc_embed);
    sc_embed->add_option("--xi-count", xi_count);

    auto* sc_region = app.add_subcommand("region", "CSV grid of closed-form predicates");
    add_common(sc_region, false);
    sc_region->add_option("--vary", vary, "axis spec NAME:LO..HI:COUNT (exactly two)");
    sc_region->add_option("--fixed", fixed, "fixed parameters k=v, comma separated");
    sc_region->add_option("--predicate", predicate, "inclusion | compact | superposition");

    auto* sc_super = app.add_subcommand("superposition", "admissible polynomial degrees");
    add_common(sc_super, false);
    add_tent_params(sc_super);
    sc_super->add_flag("--bergman", bergman,
                       "read (p,alpha) -> (q,beta) as Bergman spaces A^p_alpha -> A^q_beta");

    auto* sc_comp = app.add_subcommand("compactness", "truncated functionals toward the boundary");
    add_common(sc_comp);
    add_inputs(sc_comp);
    add_tent_params(sc_comp);
    sc_comp->add_option("--rhos", rhos, "increasing truncation radii");
    sc_comp->add_option("--xi-count", xi_count);

    auto* sc_lat = app.add_subcommand("lattice", "build and dump a separated covering lattice");
    add_common(sc_lat);
    sc_lat->add_option("--n", n);
    sc_lat->add_option("--delta", delta);
    sc_lat->add_option("--r-max", r_max);

    auto* sc_self = app.add_subcommand("selftest", "run the acceptance criteria");
    add_common(sc_self, false);
    sc_self->add_flag("--quick", quick, "reduced budgets");
    sc_self->add_option("--criterion", criteria_ids, "run only these criterion ids");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    try {
        json cfg = json::object();
        if (sub->count("--config") > 0) cfg = load_json(config_path);
        put(cfg, *sub, "seed", seed);
        put(cfg, *sub, "out", out_path);
        put(cfg, *sub, "budget", budget);
        put(cfg, *sub, "function", function_path);
        put(cfg, *sub, "measure", measure_path);
        put(cfg, *sub, "beta-v", beta_v);
        put(cfg, *sub, "fa-abs", fa_abs);
        put(cfg, *sub, "fa-theta", fa_theta);
        put(cfg, *sub, "g-theta", g_theta);
        put(cfg, *sub, "p", p);
        put(cfg, *sub, "q", q);
        put(cfg, *sub, "s", s);
        put(cfg, *sub, "t", t);
        put(cfg, *sub, "alpha", alpha);
        put(cfg, *sub, "beta", beta);
        put(cfg, *sub, "n", n);
        put(cfg, *sub, "gamma", gamma);
        put(cfg, *sub, "r", r);
        put(cfg, *sub, "delta", delta);
        put(cfg, *sub, "r-max", r_max);
        put(cfg, *sub, "rho-cut", rho_cut);
        put(cfg, *sub, "xi-count", xi_count);
        put(cfg, *sub, "rhos", rhos);
        put(cfg, *sub, "vary", vary);
        put(cfg, *sub, "fixed", fixed);
        put(cfg, *sub, "predicate", predicate);
        put(cfg, *sub, "bergman", bergman);
        put(cfg, *sub, "quick", quick);
        put(cfg, *sub, "criterion", criteria_ids);

        if (name == "norm" || name == "area") {
            const std::uint64_t sd = need<std::uint64_t>(cfg, "seed");
            const int nn = get_or(cfg, "n", 1);
            const double e1 = name == "norm" ? need<double>(cfg, "p") : need<double>(cfg, "s");
            const double e2 = name == "norm" ? need<double>(cfg, "q") : need<double>(cfg, "t");
            const double al = get_or(cfg, "alpha", 0.0);
            const double ga = get_or(cfg, "gamma", 2.0);
            cfg["n"] = nn;
            cfg["alpha"] = al;
            cfg["gamma"] = ga;
            const HoloFunction f = resolve_function(cfg, nn, e1, e2, al);
            const MeasureSpec mu = resolve_measure(cfg);
            TentNormOptions opt;
            opt.budget = get_or<std::size_t>(cfg, "budget", opt.budget);
            cfg["budget"] = opt.budget;
            opt.seed = sd;
            const IntegralEstimate est = name == "norm"
                                             ? tent_norm(f, mu, nn, e1, e2, ga, opt)
                                             : area_norm(f, mu, nn, e1, e2, ga, opt);
            return emit_report(name, cfg, to_json(est), elapsed(), est.diverged ? 2 : 0);
        }

        if (name == "carleson") {
            const std::uint64_t sd = need<std::uint64_t>(cfg, "seed");
            const int nn = get_or(cfg, "n", 1);
            cfg["n"] = nn;
            const MeasureSpec mu = resolve_measure(cfg);
            CarlesonOptions co;
            co.seed = sd;
            co.budget = get_or<std::size_t>(cfg, "budget", co.budget);
            co.xi_count = get_or<std::size_t>(cfg, "xi-count", co.xi_count);
            co.rho_cut = get_or(cfg, "rho-cut", 0.0);
            cfg["budget"] = co.budget;
            const auto est = carleson_constant(mu, nn, co);
            json res = {{"cap_statistic", est.cap_statistic},
                        {"integral_statistic", est.integral_statistic},
                        {"best_delta", est.best_delta},
                        {"diverged", est.diverged},
                        {"exact", mu.is_atomic()}};
            return emit_report(name, cfg, res, elapsed(), est.diverged ? 2 : 0);
        }

        if (name == "embed-check") {
            const std::uint64_t sd = need<std::uint64_t>(cfg, "seed");
            const TentParams P(need<double>(cfg, "p"), need<double>(cfg, "q"),
                               need<double>(cfg, "s"), need<double>(cfg, "t"),
                               get_or(cfg, "alpha", 0.0), get_or(cfg, "beta", 0.0),
                               get_or(cfg, "n", 1), get_or(cfg, "gamma", 2.0),
                               get_or(cfg, "r", 0.5));
            cfg["n"] = P.n;
            const MeasureSpec mu = resolve_measure(cfg);
            VerdictOptions vo;
            vo.seed = sd;
            vo.budget = get_or<std::size_t>(cfg, "budget", vo.budget);
            vo.xi_count = get_or<std::size_t>(cfg, "xi-count", vo.xi_count);
            cfg["budget"] = vo.budget;
            const Verdict v = embedding_verdict(mu, P, vo);
            const int code = v.bounded == Boundedness::Inconclusive || v.diverged ? 2 : 0;
            return emit_report(name, cfg, to_json(v), elapsed(), code);
        }

        if (name == "region") {
            const auto varies = get_or(cfg, "vary", std::vector<std::string>{});
            if (varies.size() != 2)
                throw ContractViolation("region: exactly two --vary axes are required");
            const VarySpec v1 = parse_vary(varies[0]), v2 = parse_vary(varies[1]);
            std::map<std::string, double> fix;
            for (const auto& group : get_or(cfg, "fixed", std::vector<std::string>{})) {
                std::stringstream ss(group);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos)
                        throw ContractViolation("region: --fixed expects k=v, got '" + item + "'");
                    fix[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
                }
            }
            const std::string pred = get_or<std::string>(cfg, "predicate", "inclusion");
            cfg["predicate"] = pred;
            if (pred != "inclusion" && pred != "compact" && pred != "superposition")
                throw ContractViolation("region: unknown predicate '" + pred + "'");
            auto value_of = [&](const std::string& key, double a1, double a2) {
                if (key == v1.name) return a1;
                if (key == v2.name) return a2;
                const auto it = fix.find(key);
                if (it == fix.end())
                    throw ContractViolation("region: parameter '" + key +
                                            "' is neither varied nor fixed");
                return it->second;
            };
            const std::string out = need<std::string>(cfg, "out");
            std::ofstream csv(out, std::ios::binary);
            if (!csv) throw ContractViolation("region: cannot write " + out);
            csv << "param1,param2,verdict,statistic,strict\n";
            std::size_t rows = 0;
            for (double a1 : grid_values(v1))
                for (double a2 : grid_values(v2)) {
                    const double pp = value_of("p", a1, a2), qq = value_of("q", a1, a2);
                    const double tt = value_of("t", a1, a2), ss = value_of("s", a1, a2);
                    const double aa = value_of("alpha", a1, a2), bb = value_of("beta", a1, a2);
                    const int nn = static_cast<int>(std::lround(value_of("n", a1, a2)));
                    bool verdict, strict;
                    double stat;
                    if (pred == "superposition") {
                        const auto d = superposition_degree(pp, qq, aa, tt, ss, bb, nn);
                        verdict = d.max_degree >= 1;
                        stat = d.bound;
                        strict = d.strict;
                    } else {
                        verdict = pred == "compact"
                                      ? compact_inclusion_region(pp, qq, aa, tt, ss, bb, nn)
                                      : inclusion_region(pp, qq, aa, tt, ss, bb, nn);
                        const double A = (nn + 1.0 + aa) / qq, B = (nn + 1.0 + bb) / ss;
                        stat = pp < tt ? (B + nn / tt) - (A + nn / pp) : B - A;
                        strict = compact_inclusion_region(pp, qq, aa, tt, ss, bb, nn);
                    }
                    csv << fmt_num(a1) << ',' << fmt_num(a2) << ','
                        << (verdict ? "true" : "false") << ',' << fmt_num(stat) << ','
                        << (strict ? "true" : "false") << '\n';
                    ++rows;
                }
            csv.close();
            json res = {{"csv", out}, {"rows", rows}, {"exact", true}};
            return emit_report(name, cfg, res, elapsed(), 0);
        }

        if (name == "superposition") {
            const int nn = get_or(cfg, "n", 1);
            cfg["n"] = nn;
            const bool bg = get_or(cfg, "bergman", false);
            const SuperpositionDegree d =
                bg ? superposition_degree_bergman(need<double>(cfg, "p"),
                                                  get_or(cfg, "alpha", 0.0),
                                                  need<double>(cfg, "q"),
                                                  get_or(cfg, "beta", 0.0), nn)
                   : superposition_degree(need<double>(cfg, "p"), need<double>(cfg, "q"),
                                          get_or(cfg, "alpha", 0.0), need<double>(cfg, "t"),
                                          need<double>(cfg, "s"), get_or(cfg, "beta", 0.0), nn);
            json res = {{"max_degree", d.max_degree},
                        {"bound", d.bound},
                        {"strict", d.strict},
                        {"bergman", bg},
                        {"exact", true}};
            return emit_report(name, cfg, res, elapsed(), 0);
        }

        if (name == "compactness") {
            const std::uint64_t sd = need<std::uint64_t>(cfg, "seed");
            const TentParams P(need<double>(cfg, "p"), need<double>(cfg, "q"),
                               need<double>(cfg, "s"), need<double>(cfg, "t"),
                               get_or(cfg, "alpha", 0.0), get_or(cfg, "beta", 0.0),
                               get_or(cfg, "n", 1), get_or(cfg, "gamma", 2.0),
                               get_or(cfg, "r", 0.5));
            cfg["n"] = P.n;
            const MeasureSpec mu = resolve_measure(cfg);
            VerdictOptions vo;
            vo.seed = sd;
            vo.budget = get_or<std::size_t>(cfg, "budget", vo.budget);
            vo.xi_count = get_or<std::size_t>(cfg, "xi-count", vo.xi_count);
            const auto rs = get_or(cfg, "rhos", std::vector<double>{0.9, 0.99, 0.999});
            cfg["rhos"] = rs;
            const auto rep = compactness_evaluators(mu, P, rs, vo);
            json res = {{"case", case_name(rep.tag)},
                        {"rho", rep.rho},
                        {"statistics", rep.statistics},
                        {"trend", rep.trend}};
            return emit_report(name, cfg, res, elapsed(), 0);
        }

        if (name == "lattice") {
            const std::uint64_t sd = need<std::uint64_t>(cfg, "seed");
            Lattice L = build_lattice(get_or(cfg, "n", 1), need<double>(cfg, "delta"),
                                      need<double>(cfg, "r-max"), sd);
            const std::size_t samples = get_or<std::size_t>(cfg, "budget", 5000);
            L.mutable_report() = verify_lattice(L, samples, sd);
            cfg["n"] = get_or(cfg, "n", 1);
            cfg["budget"] = samples;
            return emit_report(name, cfg, to_json(L), elapsed(), 0);
        }

        // selftest
        AcceptanceOptions ao;
        ao.quick = get_or(cfg, "quick", false);
        ao.seed = get_or<std::uint64_t>(cfg, "seed", ao.seed);
        const auto results = run_acceptance(ao, get_or(cfg, "criterion", std::vector<int>{}));
        json res = json::array();
        bool all_pass = true;
        for (const auto& cr : results) {
            all_pass = all_pass && cr.pass;
            std::fprintf(stderr, "criterion %2d [%s]: %s -- %s\n", cr.id, cr.name.c_str(),
                         cr.pass ? "PASS" : "FAIL", cr.detail.c_str());
            res.push_back(
                {{"id", cr.id}, {"name", cr.name}, {"pass", cr.pass}, {"detail", cr.detail}});
        }
        return emit_report(name, cfg, res, elapsed(), all_pass ? 0 : 1);
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
