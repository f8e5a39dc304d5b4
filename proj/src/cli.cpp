#include "wkit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wkit/errors.hpp"
#include "wkit/io.hpp"
#include "wkit/parallel.hpp"
#include "wkit/projective.hpp"

namespace wkit {
namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string eq;
    std::vector<std::string> at;
    std::string base = "0,0,0,0";
    std::string interval = "-1,1";
    int grid = 41;
    double tol_ode = 1e-10;
    double tol_rank = 1e-8;
    std::string out;
    // geometry / geodesic
    int samples = 4;
    bool corrupt = false;
    int geodesics = 0;
    std::string direction;
    double t_end = 0.5;
    int steps = 20;
    // incidence
    std::string with;
    // inverse
    std::string family;
    std::vector<double> t0;
    // classify
    double perturb = 0;
    unsigned seed = 7;
};

std::vector<double> numbers(const std::string& text, std::size_t n, const std::string& what) {
    std::vector<double> v;
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    double d;
    while (in >> d) v.push_back(d);
    if (!in.eof() || v.size() != n)
        throw InputError(what + ": expected " + std::to_string(n) + " comma-separated numbers, got '" + text + "'");
    for (double x : v)
        if (!std::isfinite(x)) throw InputError(what + ": non-finite value");
    return v;
}

JetPoint jet_point(const std::string& text) {
    const auto v = numbers(text, 4, "--at");
    return {v[0], v[1], v[2], v[3]};
}

SolutionParams base_params(const Config& c) {
    const auto v = numbers(c.base, 4, "--base");
    return {v[0], {v[1], v[2], v[3]}};
}

std::pair<double, double> interval(const Config& c) {
    const auto v = numbers(c.interval, 2, "--interval");
    if (!(v[0] < v[1])) throw InputError("--interval: lower must be below upper");
    return {v[0], v[1]};
}

Expression equation(const Config& c) {
    if (c.eq.empty()) throw InputError("--eq is required");
    return Expression::parse(c.eq);  // ParseError maps to exit code 2
}

std::vector<double> grid(double lo, double hi, int n) {
    if (n < 2) throw InputError("--grid must be at least 2");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

Tolerances tolerances(const Config& c) {
    if (!(c.tol_ode > 0)) throw InputError("--tol-ode must be positive");
    return {c.tol_ode, c.tol_ode};
}

Trajectory base_trajectory(const Config& c, const Expression& F, bool second_variation = false) {
    const auto [lo, hi] = interval(c);
    TrajectoryOptions opt;
    opt.tol = tolerances(c);
    opt.second_variation = second_variation;
    return Trajectory::integrate(F, base_params(c), lo, hi, opt);
}

Json config_json(const Config& c) {
    Json j{{"command", c.command},
           {"eq", c.eq},
           {"at", c.at},
           {"base", c.base},
           {"interval", c.interval},
           {"grid", c.grid},
           {"tol_ode", c.tol_ode},
           {"tol_rank", c.tol_rank},
           {"out", c.out}};
    if (c.command == "geometry") {
        j["samples"] = c.samples;
        j["corrupt_variational"] = c.corrupt;
        j["geodesics"] = c.geodesics;
    }
    if (c.command == "geometry" || c.command == "geodesic") {
        j["t_end"] = c.t_end;
        j["steps"] = c.steps;
    }
    if (c.command == "geodesic") j["direction"] = c.direction;
    if (c.command == "incidence") j["with"] = c.with;
    if (c.command == "inverse") {
        j["family"] = c.family;
        j["t0"] = c.t0;
    }
    if (c.command == "classify") {
        j["perturb"] = c.perturb;
        j["seed"] = c.seed;
    }
    return j;
}

class Output {
public:
    explicit Output(const Config& c) : dir_(c.out) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }
    template <class Writer>
    void csv(const std::string& name, Writer&& w) {
        if (dir_.empty()) return;
        std::ofstream f(std::filesystem::path(dir_) / name);
        w(f);
        files_.push_back(name);
    }
    void report(std::ostream& out, const std::string& name, Json j) {
        if (!files_.empty()) j["files"] = files_;
        const std::string text = dump_json(j);
        out << text;
        if (!dir_.empty()) std::ofstream(std::filesystem::path(dir_) / (name + ".json")) << text;
    }

private:
    std::string dir_;
    std::vector<std::string> files_;
};

// Cone direction phi x phi' at x, on the null cone of L.
Vec3 cone_direction(const Trajectory& traj, double x) {
    const TrajectorySample s = traj.sample(x);
    return s.phi[0].cross(s.phi[1]);
}

Json cmd_invariants(const Config& c) {
    const Expression F = equation(c);
    std::vector<std::string> pts = c.at.empty() ? std::vector<std::string>{"0,0,0,0"} : c.at;
    Json results = Json::array();
    for (const auto& text : pts) {
        const JetPoint pt = jet_point(text);
        const DegenerateMetric g = chern_metric(F, pt);
        const auto lie = lie_derivatives(chern_field(F), pt, 1);
        results.push_back(Json{{"at", Json::array({pt.x, pt.y, pt.p, pt.q})},
                               {"K", compute_K(F, pt)},
                               {"W", wuenschmann(F, pt)},
                               {"metric", to_json(g.g)},
                               {"direction", Json::array({g.direction[0], g.direction[1], g.direction[2], g.direction[3]})},
                               {"degeneracy", (g.g * g.direction).norm() / g.g.norm()},
                               {"proportionality_residual", proportionality_residual(lie[0], lie[1])},
                               {"cometric", to_json(dual_cometric(F, pt).m)}});
    }
    return Json{{"equation", F.to_string()}, {"points", results}};
}

Json cmd_curvature(const Config& c) {
    const Expression F = equation(c);
    const Trajectory traj = base_trajectory(c, F);
    const auto [lo, hi] = interval(c);
    const auto xs = grid(lo, hi, c.grid);
    struct Row {
        double x, printed, expanded, oracle, twelve_w, rel;
    };
    const auto rows = parallel_map<Row>(xs.size(), [&](std::size_t i) {
        const ProjectiveCurvature pc = projective_curvature(traj, xs[i]);
        const double w = wuenschmann(F, traj.point(xs[i]));
        return Row{xs[i], pc.printed, pc.expanded, pc.oracle, 12 * w, std::abs(pc.oracle - 12 * w) / (1 + std::abs(w))};
    });
    Json samples = Json::array();
    double worst = 0;
    for (const Row& r : rows) {
        worst = std::max(worst, r.rel);
        samples.push_back(Json{{"x", r.x},
                               {"curvature", r.oracle},
                               {"closed_form", r.expanded},
                               {"closed_form_as_printed", r.printed},
                               {"twelve_W", r.twelve_w},
                               {"relative_difference", r.rel}});
    }
    const SolutionParams P = base_params(c);
    std::vector<double> ts;
    for (int i = 0; i < 12; ++i) ts.push_back(P.x0 + std::pow(10.0, -3.0 + 2.0 * i / 11));
    const double exponent = osculation_exponent(P.x0, ts, osculation_defect(F, P, ts));
    return Json{{"equation", F.to_string()},
                {"max_relative_difference", worst},
                {"osculation_exponent", exponent},
                {"samples", samples}};
}

Json cmd_geometry(const Config& c, Output& out) {
    const Expression F = equation(c);
    const auto [lo, hi] = interval(c);
    const SolutionParams P = base_params(c);
    TrajectoryOptions topt;
    topt.tol = tolerances(c);
    const Trajectory traj = Trajectory::integrate(F, P, lo, hi, topt);
    const auto xs = grid(lo, hi, c.grid);
    Json warnings = Json::array();

    const auto polar = polar_curve(traj, xs);
    out.csv("polar.csv", [&](std::ostream& f) { write_curve_csv(f, polar); });
    try {
        const auto ind = indicatrix(traj, xs);
        out.csv("indicatrix.csv", [&](std::ostream& f) { write_curve_csv(f, ind); });
    } catch (const DegenerateError& e) {
        warnings.push_back(std::string("indicatrix: ") + e.what());
    }

    AxiomOptions ao;
    ao.lower = lo;
    ao.upper = hi;
    ao.samples = c.samples;
    ao.trajectory = topt;
    ao.trajectory.corrupt_variational = c.corrupt;
    const AxiomReport axioms = verify_axioms(F, P, ao);

    double sq = 0, cubic = 0;
    int on_cone = 0;
    for (double x : grid(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 9)) {
        try {
            const RegularityCheck rc = lagrangian_hessian(traj, cone_direction(traj, x), x);
            sq = std::max(sq, rc.relative_error);
            cubic = std::max(cubic, rc.relative_error_cubic);
            ++on_cone;
        } catch (const DegenerateError& e) {
            warnings.push_back(std::string("regularity at x = ") + format_number(x) + ": " + e.what());
        }
    }

    Json report{{"equation", F.to_string()},
                {"axioms", to_json(axioms)},
                {"regularity",
                 Json{{"samples", on_cone}, {"max_relative_error_square", sq}, {"max_relative_error_cubic", cubic}}}};

    if (c.geodesics > 0) {
        const double width = hi - lo;
        TrajectoryFamily fam(F, P.x0, lo - 0.25 * width, hi + 0.25 * width, topt.tol);
        Json geo = Json::array();
        double worst = 0;
        for (int k = 0; k < c.geodesics; ++k) {
            double x = lo + width * (k + 0.5) / c.geodesics;
            // Rulings through the base point itself are degenerate; shift off it.
            if (std::abs(x - P.x0) < 1e-3 * width) x += 0.25 * width / c.geodesics;
            try {
                const GeodesicComparison cmp =
                    compare_geodesic_with_incidence(fam, P.vec(), cone_direction(traj, x), c.t_end, c.steps);
                worst = std::max(worst, cmp.hausdorff);
                geo.push_back(to_json(cmp));
                out.csv("geodesic_" + std::to_string(k) + ".csv",
                        [&](std::ostream& f) { write_geodesic_csv(f, cmp.geodesic); });
            } catch (const Error& e) {
                warnings.push_back(std::string("geodesic ") + std::to_string(k) + ": " + e.what());
            }
        }
        report["geodesics"] = Json{{"max_hausdorff", worst}, {"comparisons", geo}};
    }
    report["warnings"] = warnings;
    return report;
}

Json cmd_geodesic(const Config& c, Output& out) {
    const Expression F = equation(c);
    const auto [lo, hi] = interval(c);
    const SolutionParams P = base_params(c);
    const Tolerances tol = tolerances(c);
    const double width = hi - lo;
    TrajectoryFamily fam(F, P.x0, lo - 0.25 * width, hi + 0.25 * width, tol);
    Vec3 dir;
    if (c.direction.empty()) {
        const Trajectory traj = Trajectory::integrate(F, P, lo, hi, {tol});
        dir = cone_direction(traj, P.x0 + 0.4 * (hi - P.x0));
    } else {
        const auto v = numbers(c.direction, 3, "--direction");
        dir = Vec3(v[0], v[1], v[2]);
    }
    const GeodesicComparison cmp = compare_geodesic_with_incidence(fam, P.vec(), dir, c.t_end, c.steps);
    out.csv("geodesic.csv", [&](std::ostream& f) { write_geodesic_csv(f, cmp.geodesic); });
    Json j = to_json(cmp);
    j["equation"] = F.to_string();
    j["direction"] = to_json(dir);
    return j;
}

Json cmd_incidence(const Config& c, Output& out) {
    const Expression F = equation(c);
    const auto [lo, hi] = interval(c);
    const SolutionParams P = base_params(c);
    if (c.with.empty()) throw InputError("--with y,p,q is required");
    const auto q = numbers(c.with, 3, "--with");
    const SolutionParams Q{P.x0, {q[0], q[1], q[2]}};
    const auto hit = incidence_solve(F, P, Q, lo, hi, tolerances(c));
    Json j{{"equation", F.to_string()}, {"incident", hit.has_value()}};
    if (!hit) return j;
    j["x"] = hit->x;
    j["contact"] = Json::array({hit->y, hit->p});
    j["df"] = hit->df;
    j["dfx"] = hit->dfx;
    const Trajectory tp = base_trajectory(c, F);
    const double s0 = tp.point(hit->x).q;
    const auto s_grid = grid(s0 - 1, s0 + 1, c.grid);
    const auto curve = incidence_curve(tp, hit->x, s_grid);
    out.csv("incidence.csv", [&](std::ostream& f) { write_incidence_csv(f, curve); });
    int failed = 0;
    for (const auto& s : curve) failed += !s.R;
    j["curve_samples"] = static_cast<int>(curve.size());
    j["curve_failures"] = failed;
    return j;
}

Json cmd_inverse(const Config& c, Output& out) {
    std::unique_ptr<ConicFamily> fam;
    std::optional<Trajectory> traj;
    double lo, hi;
    if (!c.family.empty()) {
        std::ifstream in(c.family);
        if (!in) throw InputError("cannot open " + c.family);
        try {
            auto sampled = std::make_unique<SampledConicFamily>(SampledConicFamily::read_csv(in));
            fam = std::move(sampled);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        std::ifstream again(c.family);
        std::string header;
        std::vector<double> ts;
        for (std::string line; std::getline(again, line);) {
            std::istringstream ss(line);
            double t;
            if (ss >> t) ts.push_back(t);
        }
        lo = ts.front();
        hi = ts.back();
    } else {
        const Expression F = equation(c);
        traj = base_trajectory(c, F);
        std::tie(lo, hi) = interval(c);
        fam = std::make_unique<PipelineConicFamily>(*traj);
        out.csv("conics.csv", [&](std::ostream& f) { write_conic_family_csv(f, *fam, grid(lo, hi, c.grid)); });
    }
    std::vector<double> t0 = c.t0;
    if (t0.empty()) t0 = grid(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), std::min(c.grid, 20));
    const auto reports = parallel_map<Json>(t0.size(), [&](std::size_t i) {
        const InverseReport r = analyze_family(*fam, t0[i], c.tol_rank);
        Json j = to_json(r);
        j["t0"] = t0[i];
        if (traj && r.point) j["distance_to_generating_point"] = projective_distance(*r.point, traj->sample(t0[i]).phi[0]);
        return j;
    });
    Json j{{"source", c.family.empty() ? "equation" : "csv"}, {"reports", reports}};
    if (!c.family.empty()) j["family"] = c.family;
    else j["equation"] = equation(c).to_string();
    return j;
}

Json cmd_classify(const Config& c) {
    const Expression F = equation(c);
    const DegenerateField field = c.perturb != 0 ? perturbed_field(F, c.perturb, c.seed) : chern_field(F);
    std::vector<JetPoint> pts;
    for (const auto& text : c.at) pts.push_back(jet_point(text));
    if (pts.empty()) pts.push_back(JetPoint{});
    const MetricClassification r = theorem2_classify(field, pts);
    Json per = Json::array();
    for (const auto& pt : pts) {
        const GammaInvariant g = gamma_invariant(field, pt);
        per.push_back(Json{{"at", Json::array({pt.x, pt.y, pt.p, pt.q})},
                           {"gamma", to_json(g.gamma)},
                           {"hadamard_ratio", g.hadamard_ratio},
                           {"adjugate_ratio", g.adjugate_ratio}});
    }
    return Json{{"equation", F.to_string()},
                {"tag", to_string(r.tag)},
                {"proportionality_residual", r.proportionality},
                {"max_adjugate_ratio", r.adjugate},
                {"min_hadamard_ratio", std::isfinite(r.hadamard) ? Json(r.hadamard) : Json(nullptr)},
                {"points", per}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Contact-invariant geometry of third-order ODEs y''' = F(x, y, p, q)", "wkit"};
    app.set_config("--config", "", "TOML configuration file (flags override it)");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--eq", c.eq, "Right-hand side F(x, y, p, q)");
    app.add_option("--at", c.at, "Jet point x,y,p,q (repeatable)");
    app.add_option("--base", c.base, "Base chart x0,y,p,q")->capture_default_str();
    app.add_option("--interval", c.interval, "Working interval lower,upper")->capture_default_str();
    app.add_option("--grid", c.grid, "Number of grid samples")->capture_default_str();
    app.add_option("--tol-ode", c.tol_ode, "Absolute and relative integrator tolerance")->capture_default_str();
    app.add_option("--tol-rank", c.tol_rank, "Relative singular-value threshold")->capture_default_str();
    app.add_option("--out", c.out, "Output directory for the JSON report and CSV files");

    app.add_subcommand("invariants", "K, W, Chern metric and Lie-derivative proportionality at jet points");
    app.add_subcommand("curvature", "Projective curvature along a solution against 12 W");
    auto* geometry = app.add_subcommand("geometry", "Polar curve, indicatrix, axiom report, regularity");
    geometry->add_option("--samples", c.samples, "Incidence abscissae per axiom check")->capture_default_str();
    geometry->add_flag("--corrupt-variational", c.corrupt, "Fault injection: flip the sign of phi_1");
    geometry->add_option("--geodesics", c.geodesics, "Number of geodesic/incidence comparisons")->capture_default_str();
    geometry->add_option("--t-end", c.t_end, "Spray time")->capture_default_str();
    geometry->add_option("--steps", c.steps, "Geodesic samples")->capture_default_str();
    auto* geodesic = app.add_subcommand("geodesic", "Null geodesic from the base point and its incidence curve");
    geodesic->add_option("--direction", c.direction, "Initial velocity (default: a cone direction)");
    geodesic->add_option("--t-end", c.t_end, "Spray time")->capture_default_str();
    geodesic->add_option("--steps", c.steps, "Geodesic samples")->capture_default_str();
    auto* incidence = app.add_subcommand("incidence", "Incidence of two solutions and the incidence curve");
    incidence->add_option("--with", c.with, "Second solution y,p,q at x0");
    auto* inverse = app.add_subcommand("inverse", "Rank classification of a conic family and point recovery");
    inverse->add_option("--family", c.family, "CSV conic family t,a11,a22,a33,a12,a13,a23");
    inverse->add_option("--t0", c.t0, "Query abscissae (repeatable)");
    auto* classify = app.add_subcommand("classify", "Classification of a degenerate metric field by Gamma");
    classify->add_option("--perturb", c.perturb, "Add eps Theta^T S Theta to the Chern metric")->capture_default_str();
    classify->add_option("--seed", c.seed, "Seed of the perturbation")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "wkit: " << e.what() << "\n";
        return 2;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        Output files(c);
        Json body;
        if (c.command == "invariants") body = cmd_invariants(c);
        else if (c.command == "curvature") body = cmd_curvature(c);
        else if (c.command == "geometry") body = cmd_geometry(c, files);
        else if (c.command == "geodesic") body = cmd_geodesic(c, files);
        else if (c.command == "incidence") body = cmd_incidence(c, files);
        else if (c.command == "inverse") body = cmd_inverse(c, files);
        else body = cmd_classify(c);
        Json report{{"config", config_json(c)}};
        for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
        files.report(out, c.command, std::move(report));
        return 0;
    } catch (const ParseError& e) {
        err << "wkit: parse error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        err << "wkit: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "wkit: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "wkit: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wkit
