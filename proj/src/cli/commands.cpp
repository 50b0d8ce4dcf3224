#include "commands.hpp"

#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>

namespace anharm::cli {

namespace {

using nlohmann::json;

std::string num(double v) { return format_number(v); }
std::string num(Index v) { return std::to_string(v); }

json conventions() {
    return {{"quadrature_normalization", "X0 = P0 = 1"},
            {"intensity_units", "output coupling prefactor dropped; intensities are up to a constant"},
            {"temperature_units", "k_B T in units of omega_a"},
            {"vectorization", "row-major, <j|rho|k> at index j*D + k"},
            {"spectrum", "S(w) = (1/pi) Re int_0^inf e^{(i w - Gamma/2) t} <X-(0) X+(t)> dt"}};
}

json base_metadata(const RunConfig& cfg, const CommandOptions& opt) {
    json meta;
    meta["conventions"] = conventions();
    meta["seedless"] = opt.seedless;
    meta["rng"] = "none";
    auto warnings = cfg.model_warnings();
    meta["warnings"] = warnings;
    return meta;
}

FockOperator sensor_operator(const RunConfig& cfg, const EigenSystem& es) {
    if (cfg.field.feed == Feed::eigen_split) {
        return frequency_components(es, cfg.field.quadrature, Split::quadrature).plus;
    }
    const auto ladder = build_ladder_operators(es.working_dim());
    return FockOperator(es.to_eigen(ladder.a.elements), Basis::eigen);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

} // namespace

SensorSetup build_sensor_setup(const RunConfig& cfg) {
    SensorSetup s;
    s.spec = cfg.model_spec();
    s.eigen = solve_model(s.spec, cfg.truncation.keep);
    // The retained set must carry the Boltzmann weight; throws otherwise.
    (void)canonical_populations(s.eigen.energies, cfg.bath.T);
    s.rates = build_eigenbasis_dissipator(s.eigen, cfg.bath.gamma_a, cfg.bath.T);
    s.L = assemble_liouvillian(s.eigen.energies, s.rates);
    s.v_ss = steady_state(s.L);
    s.x_plus = sensor_operator(cfg, s.eigen);
    s.T = build_reordering_matrices(s.x_plus, s.eigen.keep());
    return s;
}

int run_sweep_g2(const RunConfig& cfg, const CommandOptions& opt) {
    const auto Us = cfg.sweep.U.values();
    const auto Ts = cfg.sweep.T.values();
    const std::size_t nT = Ts.size();
    struct Point {
        double g2 = 0.0;
        double intensity = 0.0;
        Index keep = 0;
    };
    std::vector<Point> pts(Us.size() * nT);
    const double w = cfg.model.omega_a;
    const TruncationPolicy policy{cfg.truncation.keep, cfg.truncation.ceiling};

    parallel_for(pts.size(), opt.threads, [&](std::size_t idx, unsigned) {
        const double U = Us[idx / nT];
        const double T = Ts[idx % nT];
        Point& p = pts[idx];
        if (cfg.sweep.observable == Observable::kerr) {
            const RealVector pop = kerr_canonical_populations(w, U, T);
            p.g2 = g_n_statistic(pop, 2);
            p.intensity = mean_occupation(pop);
            p.keep = pop.size();
            return;
        }
        ModelSpec spec;
        if (cfg.sweep.observable == Observable::attractive) {
            spec = attractive_model(-U, w, cfg.truncation.dim).model;
        } else {
            spec.model = Model::quartic;
            spec.omega_a = w;
            spec.U = U;
            spec.dim = cfg.truncation.dim;
        }
        const ThermalSolution sol = solve_canonical(spec, T, policy);
        const auto comps = frequency_components(sol.eigen, cfg.sweep.quadrature);
        p.g2 = g2_zero_delay(sol.rho, comps);
        p.intensity = mean_intensity(sol.rho, comps);
        p.keep = sol.eigen.keep();
    });

    Table t;
    t.columns = {"U", "T", "g2", cfg.sweep.observable == Observable::kerr ? "mean_n" : "intensity", "levels"};
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double U = Us[i / nT];
        t.add({num(cfg.sweep.observable == Observable::attractive ? -U : U), num(Ts[i % nT]), num(pts[i].g2),
               num(pts[i].intensity), num(pts[i].keep)});
        lo = std::min(lo, pts[i].g2);
        hi = std::max(hi, pts[i].g2);
    }
    OutputWriter out(opt.out, "sweep-g2", cfg.to_json());
    out.write_csv("g2.csv", t);
    json meta = base_metadata(cfg, opt);
    meta["observable"] = to_string(cfg.sweep.observable);
    meta["row_order"] = "U outer, T inner";
    meta["summary"] = {{"points", pts.size()}, {"g2_min", lo}, {"g2_max", hi}};
    if (cfg.sweep.observable == Observable::attractive) meta["U_sign"] = "U column holds the negative quartic coefficient";
    out.write_json("g2.meta.json", meta);
    return kExitOk;
}

int run_spectrum(const RunConfig& cfg, const CommandOptions& opt) {
    const SensorSetup s = build_sensor_setup(cfg);
    const auto grid = cfg.sensors.grid1.values();
    const double G = cfg.sensors.Gamma1;
    std::vector<double> S(grid.size());
    const unsigned workers = resolve_threads(opt.threads);
    std::vector<std::unique_ptr<SensorCalculator>> calcs(workers);
    parallel_for(grid.size(), workers, [&](std::size_t i, unsigned wkr) {
        if (!calcs[wkr]) calcs[wkr] = std::make_unique<SensorCalculator>(s.L, s.T, s.v_ss);
        S[i] = calcs[wkr]->one_photon_spectrum({grid[i], G, 1.0});
    });

    Table spec;
    spec.columns = {"omega", "S", "S_omega2"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        spec.add({num(grid[i]), num(S[i]), num(S[i] * grid[i] * grid[i])});
    }

    // Coupled transitions, used to label peaks.
    struct Transition {
        Index j, k;
        double delta;
    };
    std::vector<Transition> trans;
    const Index d = s.eigen.keep();
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            if (std::abs(s.x_plus.elements(j, k)) > kMinCoupling) trans.push_back({j, k, s.eigen.delta(k, j)});
        }
    }
    Table peaks;
    peaks.columns = {"omega", "S", "j", "k", "delta_kj", "offset"};
    json peak_list = json::array();
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (!(S[i] > S[i - 1] && S[i] >= S[i + 1])) continue;
        const Transition* best = nullptr;
        for (const auto& tr : trans) {
            if (!best || std::abs(tr.delta - grid[i]) < std::abs(best->delta - grid[i])) best = &tr;
        }
        if (!best) continue;
        peaks.add({num(grid[i]), num(S[i]), num(best->j), num(best->k), num(best->delta), num(grid[i] - best->delta)});
        peak_list.push_back({{"omega", grid[i]}, {"j", best->j}, {"k", best->k}, {"delta_kj", best->delta}});
    }
    Table levels;
    levels.columns = {"j", "energy", "excitation"};
    for (Index j = 0; j < d; ++j) {
        levels.add({num(j), num(s.eigen.energies[j]), num(s.eigen.energies[j] - s.eigen.energies[0])});
    }

    OutputWriter out(opt.out, "spectrum", cfg.to_json());
    out.write_csv("spectrum.csv", spec);
    out.write_csv("peaks.csv", peaks);
    out.write_csv("levels.csv", levels);
    json meta = base_metadata(cfg, opt);
    const DensityMatrix rho{unvectorize(s.v_ss, d), Basis::eigen};
    const auto xq = frequency_components(s.eigen, cfg.field.quadrature, Split::quadrature);
    meta["summary"] = {{"Gamma1", G},
                       {"points", grid.size()},
                       {"peaks", peak_list},
                       {"mean_intensity_quadrature_split", mean_intensity(rho, xq)},
                       {"feed", to_string(cfg.field.feed)}};
    for (const auto& wmsg : s.eigen.warnings) meta["warnings"].push_back(wmsg);
    for (const auto& wmsg : s.rates.warnings) meta["warnings"].push_back(wmsg);
    out.write_json("spectrum.meta.json", meta);
    return kExitOk;
}

int run_two_photon_map(const RunConfig& cfg, const CommandOptions& opt) {
    const SensorSetup s = build_sensor_setup(cfg);
    const auto g1 = cfg.sensors.grid1.values();
    const auto g2 = cfg.sensors.second_grid().values();
    const CorrelationMap map =
        correlation_map(s.L, s.T, s.v_ss, g1, g2, cfg.sensors.Gamma1, cfg.sensors.Gamma2, opt.threads, &s.eigen);

    Table values;
    values.columns = {"omega1", "omega2", "g2"};
    for (std::size_t i = 0; i < g1.size(); ++i) {
        for (std::size_t k = 0; k < g2.size(); ++k) {
            values.add({num(g1[i]), num(g2[k]), num(map.values(static_cast<Index>(i), static_cast<Index>(k)))});
        }
    }
    Table sensors;
    sensors.columns = {"sensor", "omega", "S"};
    for (std::size_t i = 0; i < g1.size(); ++i) sensors.add({"1", num(g1[i]), num(map.s1_row[i])});
    for (std::size_t k = 0; k < g2.size(); ++k) sensors.add({"2", num(g2[k]), num(map.s1_col[k])});

    Table notes;
    notes.columns = {"kind", "j", "omega1", "omega2", "omega_sum"};
    notes.add({"diagonal", "", "", "", ""});
    for (const auto& c : map.cascades) {
        notes.add({"cascade", num(c.j), num(c.omega1), num(c.omega2), num(c.omega1 + c.omega2)});
    }
    for (const auto& l : map.leapfrogs) notes.add({"leapfrog", num(l.j), "", "", num(l.sum)});

    OutputWriter out(opt.out, "two-photon-map", cfg.to_json());
    out.write_csv("map.csv", values);
    out.write_csv("sensors.csv", sensors);
    out.write_csv("annotations.csv", notes);
    json meta = base_metadata(cfg, opt);
    meta["row_order"] = "omega1 outer, omega2 inner";
    meta["summary"] = {{"min", map.min_value},
                       {"max", map.max_value},
                       {"argmin", {g1[static_cast<std::size_t>(map.argmin.first)], g2[static_cast<std::size_t>(map.argmin.second)]}},
                       {"argmax", {g1[static_cast<std::size_t>(map.argmax.first)], g2[static_cast<std::size_t>(map.argmax.second)]}},
                       {"max_imag_residue", map.max_imag_residue},
                       {"Gamma1", map.Gamma1},
                       {"Gamma2", map.Gamma2},
                       {"feed", to_string(cfg.field.feed)}};
    for (const auto& wmsg : s.eigen.warnings) meta["warnings"].push_back(wmsg);
    for (const auto& wmsg : s.rates.warnings) meta["warnings"].push_back(wmsg);
    out.write_json("map.meta.json", meta);
    return kExitOk;
}

int run_levels(const RunConfig& cfg, const CommandOptions& opt) {
    const auto Us = cfg.levels.U.values();
    const Index count = cfg.levels.count;
    if (count > cfg.truncation.dim) throw ConfigError("levels.count exceeds truncation.dim");
    std::vector<std::string> branches;
    if (cfg.levels.branch != Branch::attractive) branches.push_back("repulsive");
    if (cfg.levels.branch != Branch::repulsive) branches.push_back("attractive");

    struct Row {
        RealVector energies;
        double change = 0.0;
    };
    std::vector<Row> rows(branches.size() * Us.size());
    parallel_for(rows.size(), opt.threads, [&](std::size_t idx, unsigned) {
        const bool attractive = branches[idx / Us.size()] == "attractive";
        const double U = Us[idx % Us.size()];
        ModelSpec spec;
        spec.model = Model::quartic;
        spec.omega_a = cfg.model.omega_a;
        spec.dim = cfg.truncation.dim;
        if (attractive && U > 0.0) {
            spec = attractive_model(-U, cfg.model.omega_a, cfg.truncation.dim).model;
        } else {
            spec.U = U;
        }
        rows[idx].energies = solve_model(spec, count).energies;
        rows[idx].change = check_truncation(spec, count, cfg.truncation.tolerance).max_relative_change;
    });

    Table t;
    t.columns = {"branch", "U", "j", "energy", "excitation"};
    double worst = 0.0;
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        const std::string& b = branches[idx / Us.size()];
        const double U = Us[idx % Us.size()];
        const RealVector& e = rows[idx].energies;
        for (Index j = 0; j < e.size(); ++j) {
            t.add({b, num(b == "attractive" ? -U : U), num(j), num(e[j]), num(e[j] - e[0])});
        }
        worst = std::max(worst, rows[idx].change);
    }
    OutputWriter out(opt.out, "levels", cfg.to_json());
    out.write_csv("levels.csv", t);
    json meta = base_metadata(cfg, opt);
    meta["summary"] = {{"max_truncation_change", worst},
                       {"converged", worst < cfg.truncation.tolerance},
                       {"attractive_parameterization", "omega_a fixed; E_C = -12 U, E_J = omega_a^2 / (8 E_C), U_6 kept"}};
    out.write_json("levels.meta.json", meta);
    return kExitOk;
}

std::vector<Check> run_checks(const RunConfig& cfg) {
    std::vector<Check> checks;
    auto run = [&](const std::string& name, double tolerance, const std::function<double(std::string&)>& body) {
        Check c;
        c.name = name;
        c.tolerance = tolerance;
        try {
            c.measured = body(c.detail);
            c.passed = std::isfinite(c.measured) && c.measured <= tolerance;
        } catch (const std::exception& e) {
            c.measured = std::numeric_limits<double>::quiet_NaN();
            c.passed = false;
            c.detail = e.what();
        }
        checks.push_back(c);
    };

    const ModelSpec spec = cfg.model_spec();
    run("truncation_convergence", cfg.truncation.tolerance, [&](std::string& detail) {
        detail = "relative change of the retained levels when the working dimension doubles";
        return check_truncation(spec, cfg.truncation.keep, cfg.truncation.tolerance).max_relative_change;
    });

    run("steady_state_vs_canonical", 1e-8, [&](std::string& detail) {
        detail = "trace distance between the eigenbasis-dissipator steady state and the canonical state";
        const SensorSetup s = build_sensor_setup(cfg);
        const DensityMatrix rho{unvectorize(s.v_ss, s.eigen.keep()), Basis::eigen};
        return trace_distance(rho, canonical_state(s.eigen, cfg.bath.T));
    });

    run("one_photon_vs_time_domain", 1e-6, [&](std::string& detail) {
        detail = "max relative difference between the resolvent spectrum and the time-domain regression integral";
        const SensorSetup s = build_sensor_setup(cfg);
        const auto grid = cfg.sensors.grid1.values();
        const auto w = linspace(grid.front(), grid.back(), cfg.validate.spectrum_points);
        const QrfSpectrum q = qrf_spectrum(s.L, s.x_plus.adjoint(), s.x_plus, s.v_ss, w, cfg.sensors.Gamma1);
        SensorCalculator calc(s.L, s.T, s.v_ss);
        double worst = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double a = calc.one_photon_spectrum({w[i], cfg.sensors.Gamma1, 1.0});
            worst = std::max(worst, std::abs(a - q.S[i]) / std::abs(q.S[i]));
        }
        return worst;
    });

    run("two_photon_vs_augmented_sensors", 1e-2, [&](std::string& detail) {
        detail = "max relative difference of g2(w1;w2) against two explicit sensors, Kerr D=4, U=0.05, T=0.6, "
                 "gamma_a=0.01, Gamma=0.02";
        ModelSpec k;
        k.model = Model::kerr;
        k.U = 0.05;
        k.dim = 4;
        const EigenSystem es = diagonalize(build_hamiltonian(k), 4);
        const double gamma = 0.01, T = 0.6, G = 0.02;
        const RateTable rates = build_eigenbasis_dissipator(es, gamma, T);
        const LiouvillianMatrix L = assemble_liouvillian(es.energies, rates);
        const DensityVector v = steady_state(L);
        const auto xp = frequency_components(es, Quadrature::X, Split::quadrature).plus;
        const ReorderingMatrices Tm = build_reordering_matrices(xp, 4);
        SensorCalculator calc(L, Tm, v);
        const double eps = 0.25 * max_oracle_epsilon(G, gamma);
        const double pts[][2] = {{1.0, 1.0},  {1.0, 1.1},  {1.1, 1.2},  {1.05, 1.05}, {0.98, 1.12},
                                 {1.2, 1.2},  {1.15, 1.02}, {1.0, 1.2}, {1.1, 1.1},  {1.12, 0.97}};
        const int n = std::min(cfg.validate.correlation_points, 10);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = calc.two_photon_correlation({pts[i][0], G, 1.0}, {pts[i][1], G, 1.0});
            const AugmentedResult o =
                augmented_two_sensor(es.energies, rates, xp, {pts[i][0], G, eps}, {pts[i][1], G, eps}, gamma);
            worst = std::max(worst, std::abs(o.g2 / a - 1.0));
        }
        return worst;
    });

    const double w = 1.0;
    run("high_T_occupation_closed_form", 1e-2, [&](std::string& detail) {
        detail = "relative error of the continuous-variable occupation at T=e^10, U=e^-3";
        const double T = std::exp(10.0), U = std::exp(-3.0);
        const double numeric = mean_occupation(kerr_canonical_populations(w, U, T));
        return std::abs(kerr_high_T_occupation(w, U, T).value / numeric - 1.0);
    });

    run("high_T_g2_limit", 2e-2, [&](std::string& detail) {
        detail = "relative distance of the canonical Kerr g2 from pi/2 at T=e^10, U=e^-3";
        return std::abs(kerr_canonical_g2(w, std::exp(-3.0), std::exp(10.0)) / (std::numbers::pi / 2.0) - 1.0);
    });

    run("subpoissonian_boundary", 5e-2, [&](std::string& detail) {
        detail = "max |g2 - 1| at the closed-form boundary for T in {0.1, 0.2, 0.3}";
        double worst = 0.0;
        for (double T : {0.1, 0.2, 0.3}) {
            const double U = kerr_subpoissonian_boundary(w, T).value;
            worst = std::max(worst, std::abs(kerr_canonical_g2(w, U, T) - 1.0));
        }
        return worst;
    });
    return checks;
}

int run_validate(const RunConfig& cfg, const CommandOptions& opt) {
    const auto checks = run_checks(cfg);
    bool all = true;
    json list = json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        json item = {{"name", c.name}, {"tolerance", c.tolerance}, {"passed", c.passed}, {"detail", c.detail}};
        item["measured"] = std::isfinite(c.measured) ? json(c.measured) : json(nullptr);
        list.push_back(item);
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_number(c.measured)
                  << " tolerance=" << format_number(c.tolerance) << "\n";
    }
    OutputWriter out(opt.out, "validate", cfg.to_json());
    json body = base_metadata(cfg, opt);
    body["schema"] = "anharm-validate-1";
    body["checks"] = list;
    body["passed"] = all;
    out.write_json("report.json", body);
    return all ? kExitOk : kExitValidation;
}

} // namespace anharm::cli
