// dasm: smooth, fit, evaluate and generate triangle surfaces.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "dasm/chart.hpp"
#include "dasm/energy.hpp"
#include "dasm/mesh.hpp"
#include "dasm/mesh_io.hpp"
#include "dasm/metrics.hpp"
#include "dasm/shapes.hpp"
#include "dasm/solver.hpp"
#include "dasm/sparse.hpp"

namespace fs = std::filesystem;
using namespace dasm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const char* kScaleNote =
    "alpha = 1, K = 4, beta = 6000 and gamma = 15 are the defaults. The gate compares |B Gamma| "
    "against gamma in mesh units, so beta and gamma depend on chart and mesh scale and usually need retuning.";

struct SolverFlags {
    SolverConfig cfg;
    std::string mode = "uniform";
    double epsilon = 0.0;
    double gate_scale = 1.0;
    std::string boundary = "reject";
};

void add_solver_flags(CLI::App& app, SolverFlags& f) {
    app.add_option("--mode", f.mode, "Smoothing mode")->check(CLI::IsMember({"uniform", "adaptive"}));
    app.add_option("--alpha", f.cfg.alpha, "Inverse step size alpha")->check(CLI::PositiveNumber);
    app.add_option("--k", f.cfg.k, "Neumann series truncation order K")->check(CLI::NonNegativeNumber);
    app.add_option("--beta", f.cfg.beta, "Adaptive gate steepness (scale dependent)");
    app.add_option("--gamma", f.cfg.gamma, "Adaptive gate midpoint on |B Gamma| (scale dependent; 45 for volumetric runs)");
    app.add_option("--gate-scale", f.gate_scale, "Multiply gamma and divide beta by this mesh-unit factor")
        ->check(CLI::PositiveNumber);
    app.add_option("--epsilon", f.epsilon, "Recursive stop threshold on ||dPhi||; 0 means 1e-4 x bounding-box diagonal")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--max-recursive-steps", f.cfg.max_recursive_steps, "Cap on recursive smoothing steps")
        ->check(CLI::PositiveNumber);
    app.add_option("--w10", f.cfg.weights.w10, "Weight of the first s derivative")->check(CLI::NonNegativeNumber);
    app.add_option("--w01", f.cfg.weights.w01, "Weight of the first r derivative")->check(CLI::NonNegativeNumber);
    app.add_option("--w11", f.cfg.weights.w11, "Weight of the mixed derivative")->check(CLI::NonNegativeNumber);
    app.add_option("--w20", f.cfg.weights.w20, "Weight of the second s derivative")->check(CLI::NonNegativeNumber);
    app.add_option("--w02", f.cfg.weights.w02, "Weight of the second r derivative")->check(CLI::NonNegativeNumber);
    app.add_flag("--materialize-b", f.cfg.materialize_b, "Form B explicitly instead of applying the series");
}

SolverConfig resolve(const SolverFlags& f) {
    SolverConfig cfg = f.cfg.with_gate_scale(f.gate_scale);
    cfg.mode = f.mode == "adaptive" ? SmoothingMode::adaptive : SmoothingMode::uniform;
    if (f.epsilon > 0.0) cfg.epsilon = f.epsilon;
    cfg.validate();
    return cfg;
}

const char* kConfigNote =
    "--config FILE reads key = value lines keyed by long flag name; unknown keys are an error and "
    "command-line flags override file values.";

void enable_config(CLI::App& app, std::string& write_config, bool solver_flags = false) {
    app.footer(solver_flags ? std::string(kScaleNote) + "\n" + kConfigNote : std::string(kConfigNote));
    app.add_option("--write-config", write_config, "Write the effective options to a config file and exit")
        ->configurable(false);
}

/// Plain key = value files carry no section; file them under the subcommand
/// being run so `dasm smooth --config run.ini` reads smooth's options.
class SubcommandConfig : public CLI::ConfigBase {
public:
    std::string section;

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigBase::from_config(input);
        if (section.empty()) return items;
        for (auto& item : items)
            if (item.parents.empty()) item.parents.push_back(section);
        return items;
    }
};

bool maybe_write_config(const CLI::App& app, const std::string& path) {
    if (path.empty()) return false;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << app.config_to_str(true, false);
    std::cerr << "wrote " << path << "\n";
    return true;
}

TriangleMesh read_mesh(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
    return load_mesh(path);
}

bool is_cloud_path(const std::string& path) { return fs::path(path).extension() == ".xyz"; }

TargetCloud read_cloud(const std::string& path, std::size_t samples, std::uint64_t seed) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
    if (is_cloud_path(path)) return load_xyz(path);
    return as_cloud(sample_surface(load_mesh(path), samples, seed));
}

SampledSurface read_surface(const std::string& path, std::size_t samples, std::uint64_t seed) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
    if (is_cloud_path(path)) return as_sampled(load_xyz(path), path);
    SampledSurface s = sample_surface(load_mesh(path), samples, seed);
    s.source = path;
    return s;
}

std::string step_path(const std::string& dir, int step) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%04d.obj", step);
    return (fs::path(dir) / name).string();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// --- smooth ---------------------------------------------------------------

struct SmoothArgs {
    std::string in, out, dump_steps, dump_matrix, write_config;
    int steps = 0;
    SolverFlags solver;
};

int run_smooth(const SmoothArgs& a) {
    const SolverConfig cfg = resolve(a.solver);
    const TriangleMesh mesh = read_mesh(a.in);
    const auto policy = a.solver.boundary == "pin" ? BoundaryPolicy::pin : BoundaryPolicy::reject;
    const VertexAdjacency adj = build_adjacency(mesh, policy);
    const SmoothingOperator op = SmoothingOperator::build(mesh, adj, cfg);
    if (!a.dump_matrix.empty()) write_matrix_market(op.a(), a.dump_matrix);
    if (!a.dump_steps.empty()) fs::create_directories(a.dump_steps);

    const Vector phi0 = positions(mesh);
    const double epsilon = cfg.resolved_epsilon(phi0);
    const auto dump = [&](int step, std::span<const double> phi) {
        if (!a.dump_steps.empty()) save_mesh(with_positions(mesh, phi), step_path(a.dump_steps, step));
    };

    Vector phi;
    int taken = 0;
    double last_change = 0.0;
    bool converged = false;
    if (a.steps > 0) {
        phi = phi0;
        const Vector zero(phi.size(), 0.0);
        for (int t = 1; t <= a.steps; ++t) {
            Vector next = smoothing_step(phi, zero, op, cfg);
            for (double v : next)
                if (!std::isfinite(v)) throw NumericalError("smoothed state contains a non-finite value");
            last_change = l2_distance(next, phi);
            phi = std::move(next);
            dump(t, phi);
            std::cerr << "step " << t << " change " << fmt(last_change) << "\n";
        }
        taken = a.steps;
        converged = last_change < epsilon;
    } else {
        Vector prev = phi0;
        RecursiveResult r = recursive_smooth(phi0, op, cfg, epsilon, [&](int t, std::span<const double> p) {
            dump(t, p);
            std::cerr << "step " << t << " change " << fmt(l2_distance(p, prev)) << "\n";
            prev.assign(p.begin(), p.end());
        });
        phi = std::move(r.phi);
        taken = r.steps;
        last_change = r.last_change;
        converged = r.converged;
    }
    save_mesh(with_positions(mesh, phi), a.out);

    std::cout << "steps " << taken << "\n"
              << "converged " << (converged ? "true" : "false") << "\n"
              << "last_change " << fmt(last_change) << "\n"
              << "epsilon " << fmt(epsilon) << "\n"
              << "mean_edge " << fmt(mean_edge_length(mesh, phi0)) << " -> " << fmt(mean_edge_length(mesh, phi)) << "\n"
              << "mean_laplacian " << fmt(mean_surface_laplacian(mesh, phi0)) << " -> "
              << fmt(mean_surface_laplacian(mesh, phi)) << "\n";
    return kExitOk;
}

// --- fit ------------------------------------------------------------------

struct FitArgs {
    std::string in, target, out, log, dump_steps, write_config;
    int steps = 50;
    double gain = 0.5;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    bool recursive = false;
    bool rebuild = false;
    bool no_early_stop = false;
    SolverFlags solver;
};

int run_fit(const FitArgs& a) {
    SolverConfig cfg = resolve(a.solver);
    cfg.recursive = a.recursive;
    cfg.rebuild_operators = a.rebuild;
    if (a.steps < 0) throw UsageError("--steps must be >= 0");
    const TriangleMesh mesh = read_mesh(a.in);
    const TargetCloud target = read_cloud(a.target, a.samples, a.seed);
    const SampledSurface target_samples = as_sampled(target, a.target);

    std::ofstream log;
    if (!a.log.empty()) {
        log.open(a.log);
        if (!log) throw UsageError("cannot write " + a.log);
        log << "step,chamfer\n";
    }
    if (!a.dump_steps.empty()) fs::create_directories(a.dump_steps);

    const auto chamfer_at = [&](std::span<const double> phi) {
        return chamfer_distance(realize_samples(mesh, phi, make_sample_layout(mesh, phi, a.samples, a.seed)),
                                target_samples);
    };
    const double initial = chamfer_at(positions(mesh));
    std::cerr << "step 0 chamfer " << fmt(initial) << "\n";
    if (log) log << 0 << "," << fmt(initial) << "\n";

    EvolveOptions options;
    options.stop_when_stationary = !a.no_early_stop;
    options.on_step = [&](int t, std::span<const double> phi) {
        const double c = chamfer_at(phi);
        std::cerr << "step " << t << " chamfer " << fmt(c) << "\n";
        if (log) log << t << "," << fmt(c) << "\n";
        if (!a.dump_steps.empty()) save_mesh(with_positions(mesh, phi), step_path(a.dump_steps, t));
    };
    const EvolveResult r = evolve(mesh, cloud_attraction_force(target, a.gain), cfg, a.steps, options);
    const Vector& final_phi = r.trajectory.back();
    save_mesh(with_positions(mesh, final_phi), a.out);

    const Vector phi0 = positions(mesh);
    std::cout << "steps " << r.trajectory.size() - 1 << "\n"
              << "stopped_early " << (r.stopped_early ? "true" : "false") << "\n"
              << "smoothing_steps " << r.smoothing_steps << "\n"
              << "chamfer " << fmt(initial) << " -> " << fmt(chamfer_at(final_phi)) << "\n"
              << "mean_laplacian " << fmt(mean_surface_laplacian(mesh, phi0)) << " -> "
              << fmt(mean_surface_laplacian(mesh, final_phi)) << "\n";
    return kExitOk;
}

// --- eval -----------------------------------------------------------------

struct EvalArgs {
    std::string pred, gt, write_config;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& a) {
    const TriangleMesh pred_mesh = read_mesh(a.pred);
    const SampledSurface pred = read_surface(a.pred, a.samples, a.seed);
    const SampledSurface gt = read_surface(a.gt, a.samples, a.seed);
    const double taus[] = {0.1, 0.3, 0.5};
    const SurfaceScores s = compare_surfaces(pred, gt, taus);
    const Vector phi = positions(pred_mesh);

    std::ostringstream json;
    json.precision(12);
    json << "{\"chamfer\": " << s.chamfer << ", \"normal\": ";
    if (s.normal) json << *s.normal;
    else json << "null";
    json << ", \"f1_0.1\": " << s.f1[0].second << ", \"f1_0.3\": " << s.f1[1].second
         << ", \"f1_0.5\": " << s.f1[2].second << ", \"mean_edge\": " << mean_edge_length(pred_mesh, phi)
         << ", \"mean_laplacian\": " << mean_surface_laplacian(pred_mesh, phi) << "}";
    std::cout << json.str() << "\n";
    return kExitOk;
}

// --- make -----------------------------------------------------------------

struct MakeArgs {
    std::string shape, out, lattice = "hex", write_config;
    int subdivisions = 3;
    int count = 1534;
    double radius = 1.0;
    double noise = 0.05;
    int spike_vertex = 0;
    double spike = 0.3;
    int rows = 10;
    int cols = 10;
    double spacing = 1.0;
    std::vector<double> axes{1.0, 1.0, 1.5};
    std::uint64_t seed = 0;
};

int run_make(const MakeArgs& a) {
    TriangleMesh mesh;
    if (a.shape == "icosphere") {
        mesh = make_icosphere(a.subdivisions, a.radius);
    } else if (a.shape == "spiked-sphere") {
        mesh = make_icosphere(a.subdivisions, a.radius);
        if (a.spike_vertex < 0 || static_cast<std::size_t>(a.spike_vertex) >= mesh.num_vertices())
            throw UsageError("--spike-vertex out of range");
        mesh = make_spike(mesh, a.spike_vertex, a.spike);
    } else if (a.shape == "noisy-sphere") {
        mesh = add_noise(make_icosphere(a.subdivisions, a.radius), a.noise, a.seed);
    } else if (a.shape == "plane") {
        mesh = make_plane(a.rows, a.cols, a.spacing, a.lattice == "square" ? LatticeKind::split_square : LatticeKind::hexagonal);
    } else if (a.shape == "ellipsoid") {
        if (a.axes.size() != 3) throw UsageError("--axes takes three values");
        mesh = scale_axes(make_icosphere(a.subdivisions, a.radius), {a.axes[0], a.axes[1], a.axes[2]});
    } else {
        mesh = make_fibonacci_sphere(a.count, a.radius);
    }
    save_mesh(mesh, a.out);
    std::cout << "vertices " << mesh.num_vertices() << "\nfaces " << mesh.num_faces() << "\n";
    return kExitOk;
}

// --- sample ---------------------------------------------------------------

struct SampleArgs {
    std::string in, out, write_config;
    std::size_t count = 10000;
    std::uint64_t seed = 0;
    bool vertices = false;
};

int run_sample(const SampleArgs& a) {
    const TriangleMesh mesh = read_mesh(a.in);
    TargetCloud cloud;
    if (a.vertices) {
        // Area-weighted vertex normals from the incident faces.
        const Vector phi = positions(mesh);
        cloud.points = mesh.vertices;
        cloud.normals.assign(mesh.num_vertices(), Vec3{0.0, 0.0, 0.0});
        for (const Face& f : mesh.faces) {
            const Vec3 c = face_cross(phi, f);
            for (VertexId v : f) cloud.normals[static_cast<std::size_t>(v)] += c;
        }
        for (auto& n : cloud.normals) {
            const double len = norm(n);
            n = len > 0.0 ? (1.0 / len) * n : Vec3{0.0, 0.0, 1.0};
        }
    } else {
        cloud = as_cloud(sample_surface(mesh, a.count, a.seed));
    }
    save_xyz(cloud, a.out);
    std::cout << "points " << cloud.points.size() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active surface smoothing, fitting and evaluation on triangle meshes"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    auto config = std::make_shared<SubcommandConfig>();
    app.config_formatter(config);
    app.set_config("--config", "", "Read options from a key = value file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    SmoothArgs sm;
    auto* smooth = app.add_subcommand("smooth", "Denoise a mesh with zero-force smoothing steps");
    smooth->option_defaults()->always_capture_default();
    smooth->add_option("--in", sm.in, "Input mesh (.obj or .off)")->required();
    smooth->add_option("--out", sm.out, "Output mesh")->required();
    smooth->add_option("--steps", sm.steps, "Run exactly this many steps; 0 smooths until ||dPhi|| < epsilon")
        ->check(CLI::NonNegativeNumber);
    smooth->add_option("--dump-steps", sm.dump_steps, "Directory for per-step OBJ snapshots");
    smooth->add_option("--dump-matrix", sm.dump_matrix, "Write the regularization matrix A (MatrixMarket)");
    smooth->add_option("--boundary", sm.solver.boundary, "Open fans: reject, or pin boundary vertices in place")
        ->check(CLI::IsMember({"reject", "pin"}));
    add_solver_flags(*smooth, sm.solver);
    enable_config(*smooth, sm.write_config, true);

    FitArgs ft;
    ft.solver.mode = "adaptive";
    auto* fit = app.add_subcommand("fit", "Evolve a closed mesh toward a target point cloud");
    fit->option_defaults()->always_capture_default();
    fit->add_option("--in", ft.in, "Initial mesh")->required();
    fit->add_option("--target", ft.target, "Target cloud (.xyz) or mesh to sample")->required();
    fit->add_option("--out", ft.out, "Output mesh")->required();
    fit->add_option("--steps", ft.steps, "Outer iterations")->check(CLI::NonNegativeNumber);
    fit->add_option("--gain", ft.gain, "Attraction gain on (nearest target point - vertex)")->check(CLI::PositiveNumber);
    fit->add_option("--samples", ft.samples, "Samples for meshes given as targets and for the Chamfer log");
    fit->add_option("--seed", ft.seed, "Sampling seed");
    fit->add_option("--log", ft.log, "Per-step Chamfer log (CSV)");
    fit->add_option("--dump-steps", ft.dump_steps, "Directory for per-step OBJ snapshots");
    fit->add_flag("--recursive", ft.recursive, "Smooth to a fixed point after every step");
    fit->add_flag("--rebuild-operators", ft.rebuild, "Rebuild charts and A every step");
    fit->add_flag("--no-early-stop", ft.no_early_stop, "Keep iterating after the mesh stops moving");
    add_solver_flags(*fit, ft.solver);
    enable_config(*fit, ft.write_config, true);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Compare a predicted mesh against a reference; prints one JSON line");
    eval->option_defaults()->always_capture_default();
    eval->add_option("--pred", ev.pred, "Predicted mesh")->required();
    eval->add_option("--gt", ev.gt, "Reference mesh or .xyz cloud")->required();
    eval->add_option("--samples", ev.samples, "Samples per mesh")->check(CLI::PositiveNumber);
    eval->add_option("--seed", ev.seed, "Sampling seed");
    enable_config(*eval, ev.write_config);

    MakeArgs mk;
    auto* make = app.add_subcommand("make", "Generate a test surface");
    make->option_defaults()->always_capture_default();
    make->add_option("shape", mk.shape, "Shape to generate")
        ->required()
        ->check(CLI::IsMember({"icosphere", "spiked-sphere", "noisy-sphere", "plane", "ellipsoid", "fibonacci-sphere"}));
    make->add_option("--out", mk.out, "Output mesh")->required();
    make->add_option("--subdivisions", mk.subdivisions, "Icosphere subdivision level")->check(CLI::Range(0, 8));
    make->add_option("--radius", mk.radius, "Sphere radius")->check(CLI::PositiveNumber);
    make->add_option("--noise", mk.noise, "noisy-sphere: displacement amplitude")->check(CLI::NonNegativeNumber);
    make->add_option("--spike-vertex", mk.spike_vertex, "spiked-sphere: displaced vertex");
    make->add_option("--spike", mk.spike, "spiked-sphere: radial offset");
    make->add_option("--rows", mk.rows, "plane: vertex rows")->check(CLI::Range(2, 100000));
    make->add_option("--cols", mk.cols, "plane: vertex columns")->check(CLI::Range(2, 100000));
    make->add_option("--spacing", mk.spacing, "plane: lattice spacing")->check(CLI::PositiveNumber);
    make->add_option("--lattice", mk.lattice, "plane: lattice kind")->check(CLI::IsMember({"hex", "square"}));
    make->add_option("--axes", mk.axes, "ellipsoid: semi-axis scale factors")->expected(3);
    make->add_option("--count", mk.count, "fibonacci-sphere: vertex count")->check(CLI::Range(4, 10000000));
    make->add_option("--seed", mk.seed, "Noise seed");
    enable_config(*make, mk.write_config);

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "Write surface samples (or vertices) of a mesh as .xyz");
    sample->option_defaults()->always_capture_default();
    sample->add_option("--in", sa.in, "Input mesh")->required();
    sample->add_option("--out", sa.out, "Output .xyz")->required();
    sample->add_option("--count", sa.count, "Number of samples");
    sample->add_option("--seed", sa.seed, "Sampling seed");
    sample->add_flag("--vertices", sa.vertices, "Write vertices with area-weighted normals instead of samples");
    enable_config(*sample, sa.write_config);

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (!arg.empty() && arg[0] != '-') {
            config->section = arg;
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*smooth) return maybe_write_config(*smooth, sm.write_config) ? kExitOk : run_smooth(sm);
        if (*fit) return maybe_write_config(*fit, ft.write_config) ? kExitOk : run_fit(ft);
        if (*eval) return maybe_write_config(*eval, ev.write_config) ? kExitOk : run_eval(ev);
        if (*make) return maybe_write_config(*make, mk.write_config) ? kExitOk : run_make(mk);
        if (*sample) return maybe_write_config(*sample, sa.write_config) ? kExitOk : run_sample(sa);
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
