#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <opfree/covering.hpp>
#include <opfree/json_io.hpp>
#include <opfree/verify.hpp>

namespace {

using opfree::Complex;
using opfree::ComplexMatrix;
using opfree::Json;

constexpr double kPi = 3.14159265358979323846;

void emit_error(const std::string& kind, const std::string& message) {
    const Json err{{"error", Json{{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << std::endl;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw opfree::IoError("cannot open input file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw opfree::IoError("cannot read input file " + path);
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw opfree::SchemaError(path + ": " + e.what());
    }
}

// Empty path means stdout.
void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw opfree::IoError("cannot open output file " + path);
    out << text;
    if (!out) throw opfree::IoError("cannot write output file " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<Complex> parse_points(const Json& j) {
    if (!j.is_array() || j.empty())
        throw opfree::SchemaError("points: expected a nonempty array of [re, im] pairs");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (const auto& p : j) out.push_back(opfree::detail::json_complex(p, "points"));
    return out;
}

// The input of density/atoms is recognized by its keys: recurrence
// coefficients carry "alphas", a model carries "dim", a measure "type".
enum class InputKind { measure, jacobi, model };

InputKind classify(const Json& j) {
    if (!j.is_object()) throw opfree::SchemaError("input: expected a JSON object");
    if (j.contains("alphas")) return InputKind::jacobi;
    if (j.contains("dim")) return InputKind::model;
    if (j.contains("type")) return InputKind::measure;
    throw opfree::SchemaError("input: expected a measure, coefficient, or model object");
}

opfree::JacobiCoefficients jacobi_of_measure(const Json& j, std::size_t depth) {
    const auto spec = opfree::parse_measure(j);
    if (std::holds_alternative<opfree::DiscreteMeasure>(spec))
        return opfree::jacobi_from_discrete(std::get<opfree::DiscreteMeasure>(spec));
    const auto& ms = std::get<opfree::MomentSequence>(spec);
    if (depth == 0) depth = ms.moments.size() / 2;
    return opfree::jacobi_from_moments(ms, depth);
}

// Transform evaluator that reuses the previous solution as the starting
// point of the next solve; consecutive grid points are close, so this cuts
// the iteration count considerably on scans.
struct WarmTransform {
    opfree::SemicircularModel model;
    opfree::State state;
    std::optional<ComplexMatrix> warm;

    Complex operator()(Complex xi) {
        if (!(xi.imag() > 0.0))
            throw opfree::DomainError("transform: evaluation point must satisfy Im > 0");
        ComplexMatrix b = ComplexMatrix::identity(model.dim);
        b *= xi;
        opfree::SolveOptions opts;
        opts.initial = warm;
        try {
            ComplexMatrix g = opfree::solve_cauchy(model, b, opts);
            const Complex value = state.apply(g);
            warm = std::move(g);
            return value;
        } catch (const opfree::NumericError&) {
            warm.reset();
            throw;
        }
    }
};

std::function<Complex(Complex)> transform_of(const Json& input, InputKind kind) {
    switch (kind) {
        case InputKind::measure: {
            const auto spec = opfree::parse_measure(input);
            if (!std::holds_alternative<opfree::DiscreteMeasure>(spec))
                throw opfree::SchemaError(
                    "atoms: moment input not supported here, convert with jacobi first");
            auto mu = std::get<opfree::DiscreteMeasure>(spec);
            return [mu = std::move(mu)](Complex xi) { return opfree::cauchy_exact(mu, xi); };
        }
        case InputKind::jacobi: {
            auto jc = opfree::parse_jacobi(input);
            const std::size_t depth = jc.alphas.size();
            return [jc = std::move(jc), depth](Complex xi) {
                return opfree::cf_eval(jc, xi, depth);
            };
        }
        case InputKind::model:
            return WarmTransform{opfree::parse_model(input), opfree::trace_state(), {}};
    }
    throw opfree::SchemaError("input: unrecognized kind");
}

// Rough two-sided bound on where the spectrum can live, used as the default
// scan range.
double reach_of(const Json& input, InputKind kind) {
    switch (kind) {
        case InputKind::measure: {
            const auto spec = opfree::parse_measure(input);
            if (std::holds_alternative<opfree::DiscreteMeasure>(spec))
                return opfree::support_radius(std::get<opfree::DiscreteMeasure>(spec));
            return std::get<opfree::MomentSequence>(spec).support_bound;
        }
        case InputKind::jacobi: {
            const auto jc = opfree::parse_jacobi(input);
            double a = 0.0, w = 0.0;
            for (double v : jc.alphas) a = std::max(a, std::abs(v));
            for (double v : jc.omegas) w = std::max(w, std::sqrt(v));
            return a + 2.0 * w;
        }
        case InputKind::model: {
            const auto model = opfree::parse_model(input);
            const ComplexMatrix eta_one =
                opfree::cp_apply(model.variance, ComplexMatrix::identity(model.dim));
            return opfree::operator_norm(model.mean) +
                   2.0 * std::sqrt(opfree::operator_norm(eta_one));
        }
    }
    throw opfree::SchemaError("input: unrecognized kind");
}

struct ScanConfig {
    double xmin = 0.0;
    double xmax = 0.0;
    std::size_t steps = 2001;
    double epsilon = 1e-4;
    double tolerance = 1e-3;
};

// Point masses show up in the smoothed density as Poisson bumps of height
// mass/(pi*eps). The scan smooths with at least one grid step so nothing
// falls between samples, takes local maxima that are heavy enough to be
// candidates, sharpens each location (the reciprocal of a Poisson bump is a
// parabola in x, and Re(1/G) crosses zero at the mass), and lets the mass
// estimator have the final word. Background maxima of a continuous part get
// weighed like everything else and fall below the mass floor.
std::vector<double> scan_atom_locations(const std::function<Complex(Complex)>& g,
                                        const ScanConfig& cfg) {
    const double h = (cfg.xmax - cfg.xmin) / static_cast<double>(cfg.steps - 1);
    const double eps = std::max(cfg.epsilon, h);
    std::vector<double> xs(cfg.steps), dens(cfg.steps);
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        xs[i] = cfg.xmin + h * static_cast<double>(i);
        dens[i] = -g(Complex(xs[i], eps)).imag() / kPi;
    }

    std::vector<double> found;
    for (std::size_t i = 1; i + 1 < cfg.steps; ++i) {
        if (!(dens[i] > dens[i - 1]) || !(dens[i] >= dens[i + 1])) continue;
        if (dens[i] * kPi * eps < 0.5 * cfg.tolerance) continue;

        double loc = xs[i];
        if (dens[i - 1] > 0.0 && dens[i + 1] > 0.0) {
            const double u0 = 1.0 / dens[i - 1], u1 = 1.0 / dens[i], u2 = 1.0 / dens[i + 1];
            const double denom = u0 - 2.0 * u1 + u2;
            if (denom > 0.0) {
                const double shift = 0.5 * (u0 - u2) / denom;
                if (std::abs(shift) <= 1.0) loc = xs[i] + shift * h;
            }
        }

        // zero of Re(1/G) just above the axis nails the location to far
        // better than grid resolution, which the depth-graded mass ladder
        // then needs
        const double probe = 1e-6;
        const auto u = [&](double r) {
            const Complex v = g(Complex(r, probe));
            return (1.0 / v).real();
        };
        try {
            double lo = loc - h, hi = loc + h;
            double ulo = u(lo), uhi = u(hi);
            if (std::isfinite(ulo) && std::isfinite(uhi) && (ulo < 0.0) != (uhi < 0.0)) {
                for (int step = 0; step < 60; ++step) {
                    const double mid = 0.5 * (lo + hi);
                    const double umid = u(mid);
                    if (!std::isfinite(umid)) break;
                    if ((umid < 0.0) == (ulo < 0.0)) {
                        lo = mid;
                        ulo = umid;
                    } else {
                        hi = mid;
                    }
                }
                loc = 0.5 * (lo + hi);
            }
        } catch (const opfree::NumericError&) {
            // keep the parabola estimate when the probe line is unreachable
        }
        found.push_back(loc);
    }

    std::sort(found.begin(), found.end());
    std::vector<double> merged;
    for (double r : found)
        if (merged.empty() || r - merged.back() > h) merged.push_back(r);
    return merged;
}

int run_jacobi(const std::string& input, const std::string& output, std::size_t depth) {
    const auto jc = jacobi_of_measure(load_json(input), depth);
    write_json(output, opfree::to_json(jc));
    return 0;
}

int run_transform(const std::string& input, const std::string& output, std::size_t depth) {
    const Json in = load_json(input);
    opfree::detail::require_keys(in, "transform input", {"jacobi", "points"});
    const auto jc = opfree::parse_jacobi(in["jacobi"]);
    const auto points = parse_points(in["points"]);
    if (depth == 0) depth = jc.alphas.size();

    Json values = Json::array();
    double truncation = 0.0;
    for (Complex xi : points) {
        const Complex v = opfree::cf_eval(jc, xi, depth);
        if (!jc.exhausted && depth >= 2)
            truncation =
                std::max(truncation, std::abs(v - opfree::cf_eval(jc, xi, depth / 2)));
        values.push_back(opfree::to_json(v));
    }
    if (!jc.exhausted && depth >= 2)
        opfree::log_info("transform: depth " + std::to_string(depth) + " vs " +
                         std::to_string(depth / 2) + " differ by at most " +
                         std::to_string(truncation));
    write_json(output, values);
    return 0;
}

int run_solve(const std::string& input, const std::string& output) {
    const Json in = load_json(input);
    opfree::detail::require_keys(in, "solve input", {"model", "points"});
    const auto model = opfree::parse_model(in["model"]);
    const auto points = parse_points(in["points"]);

    Json out = Json::array();
    for (Complex xi : points) {
        if (!(xi.imag() > 0.0))
            throw opfree::DomainError("solve: evaluation points must satisfy Im > 0");
        ComplexMatrix b = ComplexMatrix::identity(model.dim);
        b *= xi;
        out.push_back(opfree::to_json(opfree::solve_cauchy(model, b)));
    }
    write_json(output, out);
    return 0;
}

int run_density(const std::string& input, const std::string& output, double xmin, double xmax,
                std::size_t steps, double epsilon) {
    if (steps < 2) throw opfree::SchemaError("density: steps must be at least 2");
    if (!(epsilon > 0.0)) throw opfree::SchemaError("density: epsilon must be positive");
    if (!(xmax > xmin)) throw opfree::SchemaError("density: xmax must exceed xmin");
    const Json in = load_json(input);
    const InputKind kind = classify(in);
    if (kind == InputKind::measure)
        throw opfree::SchemaError("density: pass coefficients or a model, not a raw measure");
    auto g = transform_of(in, kind);

    std::string csv = "x,density\n";
    const double h = (xmax - xmin) / static_cast<double>(steps - 1);
    char row[80];
    for (std::size_t i = 0; i < steps; ++i) {
        const double x = xmin + h * static_cast<double>(i);
        const double d = -g(Complex(x, epsilon)).imag() / kPi;
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", x, d);
        csv += row;
    }
    write_text(output, csv);
    return 0;
}

int run_atoms(const std::string& input, const std::string& output,
              const std::vector<double>& at, std::optional<double> xmin,
              std::optional<double> xmax, std::size_t steps, double epsilon,
              double tolerance) {
    if (!(epsilon > 0.0)) throw opfree::SchemaError("atoms: epsilon must be positive");
    if (steps < 3) throw opfree::SchemaError("atoms: steps must be at least 3");
    const Json in = load_json(input);
    const InputKind kind = classify(in);
    const auto g = transform_of(in, kind);

    Json out = Json::array();
    if (!at.empty()) {
        for (double r : at) out.push_back(opfree::to_json(opfree::atom_mass(g, r)));
        write_json(output, out);
        return 0;
    }

    ScanConfig cfg;
    const double reach = reach_of(in, kind) + 1.0;
    cfg.xmin = xmin.value_or(-reach);
    cfg.xmax = xmax.value_or(reach);
    if (!(cfg.xmax > cfg.xmin)) throw opfree::SchemaError("atoms: xmax must exceed xmin");
    cfg.steps = steps;
    cfg.epsilon = epsilon;
    cfg.tolerance = tolerance;
    for (double r : scan_atom_locations(g, cfg)) {
        try {
            auto report = opfree::atom_mass(g, r);
            if (report.mass > tolerance) out.push_back(opfree::to_json(report));
        } catch (const opfree::NumericError& e) {
            opfree::log_info("atoms: skipping candidate at " + std::to_string(r) + " (" +
                             e.what() + ")");
        }
    }
    write_json(output, out);
    return 0;
}

int run_nilpotency(const std::string& input, const std::string& output) {
    const auto model = opfree::parse_model(load_json(input));
    write_json(output, opfree::to_json(opfree::kraus_nilpotent_commuting_check(model.variance)));
    return 0;
}

int run_cover(const std::string& input, const std::string& output, std::size_t depth) {
    const auto jc = jacobi_of_measure(load_json(input), depth);
    write_json(output, opfree::to_json(opfree::covering_decomposition(jc)));
    return 0;
}

int run_verify(const std::string& output, std::uint64_t seed) {
    const auto results = opfree::run_acceptance_suite(seed, &std::cout);
    std::size_t failures = 0;
    Json rows = Json::array();
    for (const auto& r : results) {
        if (!r.passed) ++failures;
        rows.push_back(Json{{"id", r.id}, {"passed", r.passed}, {"detail", r.detail}});
    }
    if (!output.empty()) write_json(output, rows);
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"computational free probability toolkit"};
    app.require_subcommand(1);

    std::string input, output;
    std::size_t depth = 0, steps_density = 1001, steps_atoms = 2001;
    double epsilon_density = 1e-4, epsilon_atoms = 1e-4, tolerance = 1e-3;
    double xmin_density = -5.0, xmax_density = 5.0;
    std::optional<double> xmin_atoms, xmax_atoms;
    std::vector<double> at;
    std::uint64_t seed = 0;

    auto* jacobi = app.add_subcommand("jacobi", "recurrence coefficients of a measure");
    jacobi->add_option("--input", input)->required();
    jacobi->add_option("--output", output);
    jacobi->add_option("--depth", depth, "levels to extract from moment input");

    auto* transform = app.add_subcommand("transform", "evaluate the transform from coefficients");
    transform->add_option("--input", input)->required();
    transform->add_option("--output", output);
    transform->add_option("--depth", depth, "continued fraction depth (default: all levels)");

    auto* solve = app.add_subcommand("solve", "matrix transform of a semicircular model");
    solve->add_option("--input", input)->required();
    solve->add_option("--output", output);

    auto* density = app.add_subcommand("density", "smoothed spectral density as CSV");
    density->add_option("--input", input)->required();
    density->add_option("--output", output);
    density->add_option("--xmin", xmin_density);
    density->add_option("--xmax", xmax_density);
    density->add_option("--steps", steps_density);
    density->add_option("--epsilon", epsilon_density, "distance to the real axis");

    auto* atoms = app.add_subcommand("atoms", "locate and weigh point masses");
    atoms->add_option("--input", input)->required();
    atoms->add_option("--output", output);
    atoms->add_option("--at", at, "evaluate at these locations instead of scanning")
        ->delimiter(',');
    atoms->add_option("--xmin", xmin_atoms, "scan start (default: derived from input)");
    atoms->add_option("--xmax", xmax_atoms, "scan end (default: derived from input)");
    atoms->add_option("--steps", steps_atoms);
    atoms->add_option("--epsilon", epsilon_atoms, "scan smoothing height");
    atoms->add_option("--tolerance", tolerance, "smallest mass to keep");

    auto* nilpotency = app.add_subcommand("nilpotency", "structure report for the variance map");
    nilpotency->add_option("--input", input)->required();
    nilpotency->add_option("--output", output);

    auto* cover = app.add_subcommand("cover", "component measures and their mixture");
    cover->add_option("--input", input)->required();
    cover->add_option("--output", output);
    cover->add_option("--depth", depth, "levels to extract from moment input");

    auto* verify = app.add_subcommand("verify", "run the built-in verification suite");
    verify->add_option("--output", output, "also write the results as JSON");
    verify->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("schema", e.what());
        return 2;
    }

    try {
        if (jacobi->parsed()) return run_jacobi(input, output, depth);
        if (transform->parsed()) return run_transform(input, output, depth);
        if (solve->parsed()) return run_solve(input, output);
        if (density->parsed())
            return run_density(input, output, xmin_density, xmax_density, steps_density,
                               epsilon_density);
        if (atoms->parsed())
            return run_atoms(input, output, at, xmin_atoms, xmax_atoms, steps_atoms,
                             epsilon_atoms, tolerance);
        if (nilpotency->parsed()) return run_nilpotency(input, output);
        if (cover->parsed()) return run_cover(input, output, depth);
        if (verify->parsed()) return run_verify(output, seed);
        emit_error("schema", "no subcommand selected");
        return 2;
    } catch (const opfree::SchemaError& e) {
        emit_error("schema", e.what());
        return 2;
    } catch (const opfree::IoError& e) {
        emit_error("io", e.what());
        return 4;
    } catch (const opfree::NumericError& e) {
        emit_error("numeric", e.what());
        return 3;
    } catch (const Json::exception& e) {
        emit_error("schema", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("numeric", e.what());
        return 3;
    }
}
