#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "resvort/config.hpp"
#include "resvort/grid_eval.hpp"
#include "resvort/solver.hpp"
#include "resvort/table_io.hpp"
#include "resvort/version.hpp"
#include "resvort/vortex.hpp"

namespace fs = std::filesystem;
using namespace resvort;

namespace {

struct Ctx {
    RunConfig cfg;
    std::string out_dir = ".";
    std::string config_echo;
    bool verbose = false;
    RunManifest manifest;
};

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

void emit(Ctx& ctx, TaskRecord& task, const std::string& name, const Table& t) {
    const std::string content = render_table(t);
    const fs::path p = fs::path(ctx.out_dir) / name;
    write_file_atomic(p.string(), content);
    task.outputs.push_back({name, fnv1a64(content), content.size()});
    if (ctx.verbose) std::cerr << "wrote " << p.string() << "\n";
}

std::vector<Complex> config_seeds(const RunConfig& cfg) {
    std::vector<Complex> seeds;
    if (!cfg.seeds_re.empty()) {
        for (double re : cfg.seeds_re) seeds.emplace_back(re, cfg.seed_im);
        return seeds;
    }
    return seed_guesses(cfg.level_index, cfg.model);
}

std::vector<Resonance> refine_seeds(const RunConfig& cfg) {
    std::vector<Resonance> out;
    for (Complex s : config_seeds(cfg)) {
        try {
            Resonance r = refine_root(s, cfg.model, cfg.contour);
            bool dup = false;
            for (const Resonance& o : out)
                if (std::abs(o.energy - r.energy) < 1e-6) dup = true;
            if (!dup) out.push_back(r);
        } catch (const ConvergenceError&) {
            // a seed that fails to converge is skipped, not fatal
        } catch (const ValiditySectorError&) {
        }
    }
    if (out.empty()) throw ConvergenceError("no seed converged to a resonance");
    return out;
}

// Stable resonance for the wavefunction-level commands: stabilization search
// when the bracket is enabled, plain refinement at the configured field
// otherwise.  Returns the field actually used.
std::pair<double, Resonance> resolve_state(const RunConfig& cfg) {
    std::vector<Resonance> roots = refine_seeds(cfg);
    const StabilizationBlock& sb = cfg.stabilization;
    if (sb.bracket_lo < sb.bracket_hi) {
        Stabilization st =
            find_stabilization(roots.front(), sb.bracket_lo, sb.bracket_hi, sb.tol_field,
                               cfg.contour);
        return {st.field, st.resonance};
    }
    return {cfg.model.field, roots.front()};
}

void task_resonance(Ctx& ctx) {
    TaskRecord task;
    task.name = "resonance";
    const double t0 = now_ms();
    Table t;
    t.comments = {"resonance table", "columns: field, re_energy, im_energy, width, lifetime, residual, iterations"};
    Column cf{"field", {}}, cre{"re_energy", {}}, cim{"im_energy", {}}, cw{"width", {}},
        cl{"lifetime", {}}, cr{"residual", {}}, ci{"iterations", {}};
    for (const Resonance& r : refine_seeds(ctx.cfg)) {
        cf.values.push_back(r.params.field);
        cre.values.push_back(r.energy.real());
        cim.values.push_back(r.energy.imag());
        cw.values.push_back(r.width());
        cl.values.push_back(r.lifetime());
        cr.values.push_back(r.residual);
        ci.values.push_back(r.iterations);
    }
    t.columns = {cf, cre, cim, cw, cl, cr, ci};
    emit(ctx, task, "resonance.csv", t);
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

void emit_sweep_files(Ctx& ctx, TaskRecord& task, const Trajectory& traj, int index) {
    Table t;
    t.comments = {"pole trajectory", "columns: field, re_energy, im_energy"};
    Column cf{"field", {}}, cre{"re_energy", {}}, cim{"im_energy", {}};
    for (const TrajectoryPoint& p : traj.points) {
        cf.values.push_back(p.field);
        cre.values.push_back(p.resonance.energy.real());
        cim.values.push_back(p.resonance.energy.imag());
    }
    t.columns = {cf, cre, cim};
    emit(ctx, task, "sweep_" + std::to_string(index) + ".csv", t);

    Table t2;
    t2.comments = {"pole trajectory, display transform sign(im)*|im|^(1/5)",
                   "columns: field, re_energy, im_energy_pow15"};
    Column c2{"im_energy_pow15", {}};
    for (const TrajectoryPoint& p : traj.points) {
        const double im = p.resonance.energy.imag();
        c2.values.push_back((im < 0 ? -1.0 : 1.0) * std::pow(std::abs(im), 0.2));
    }
    t2.columns = {cf, cre, c2};
    emit(ctx, task, "sweep_fig2_" + std::to_string(index) + ".csv", t2);
}

void task_sweep(Ctx& ctx) {
    TaskRecord task;
    task.name = "sweep";
    const double t0 = now_ms();
    StepControl sc;
    sc.initial_step = ctx.cfg.sweep.initial_step;
    sc.max_step = ctx.cfg.sweep.max_step;
    std::vector<Resonance> roots = refine_seeds(ctx.cfg);
    std::vector<Trajectory> trajs;
    for (size_t k = 0; k < roots.size(); ++k) {
        Trajectory traj = sweep_field(roots[k], ctx.cfg.sweep.field_min,
                                      ctx.cfg.sweep.field_max, sc, ctx.cfg.contour);
        emit_sweep_files(ctx, task, traj, int(k));
        trajs.push_back(std::move(traj));
    }
    // branch-collision flag across tracked roots
    for (size_t a = 0; a + 1 < trajs.size(); ++a)
        for (size_t b = a + 1; b < trajs.size(); ++b)
            for (size_t i = 0; i < std::min(trajs[a].points.size(), trajs[b].points.size()); ++i)
                if (std::abs(trajs[a].points[i].resonance.energy -
                             trajs[b].points[i].resonance.energy) < 1e-6)
                    task.notes.push_back("branch collision between tracks " +
                                         std::to_string(a) + " and " + std::to_string(b));
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

void task_wavefunction(Ctx& ctx) {
    TaskRecord task;
    task.name = "wavefunction";
    const double t0 = now_ms();
    auto [field, res] = resolve_state(ctx.cfg);
    ModelParams mp = ctx.cfg.model;
    mp.field = field;
    Table t;
    t.comments = {"wavefunction slice along y = 0",
                  "field " + format_g9(field) + ", re_energy " + format_g9(res.energy.real()) +
                      ", im_energy " + format_g9(res.energy.imag()),
                  "columns: x, abs_psi, re_psi, im_psi"};
    Column cx{"x", {}}, ca{"abs_psi", {}}, cre{"re_psi", {}}, cim{"im_psi", {}};
    const WindowBlock& w = ctx.cfg.window;
    for (int i = 0; i < w.nx; ++i) {
        const double x = w.xmin + (w.xmax - w.xmin) * i / (w.nx - 1);
        if (std::abs(x) < kOriginGuardRadius) continue;  // impurity guard disk
        const Complex v = psi({x, 0.0}, res.energy, WavefunctionKind::retarded, mp,
                              ctx.cfg.contour);
        cx.values.push_back(x);
        ca.values.push_back(std::abs(v));
        cre.values.push_back(v.real());
        cim.values.push_back(v.imag());
    }
    t.columns = {cx, ca, cre, cim};
    emit(ctx, task, "wavefunction.csv", t);
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

Rect window_rect(const WindowBlock& w) { return {w.xmin, w.xmax, w.ymin, w.ymax}; }

void task_vortices(Ctx& ctx) {
    TaskRecord task;
    task.name = "vortices";
    const double t0 = now_ms();
    auto [field, res] = resolve_state(ctx.cfg);
    ModelParams mp = ctx.cfg.model;
    mp.field = field;
    const WindowBlock& w = ctx.cfg.window;
    std::vector<Vortex> vs =
        locate_vortices(window_rect(w), std::min(w.nx, 81), std::min(w.ny, 81), res.energy,
                        mp, ctx.cfg.contour);
    Table t;
    t.comments = {"vortex table at field " + format_g9(field),
                  "columns: index, x, y, charge, residual"};
    Column ci{"index", {}}, cx{"x", {}}, cy{"y", {}}, cc{"charge", {}}, cr{"residual", {}};
    for (size_t i = 0; i < vs.size(); ++i) {
        ci.values.push_back(double(i + 1));
        cx.values.push_back(vs[i].position.x);
        cy.values.push_back(vs[i].position.y);
        cc.values.push_back(vs[i].charge);
        cr.values.push_back(vs[i].refine_residual);
    }
    t.columns = {ci, cx, cy, cc, cr};
    emit(ctx, task, "vortices.csv", t);

    // vortex paths over the sweep range
    StepControl sc;
    sc.initial_step = ctx.cfg.sweep.initial_step;
    sc.max_step = ctx.cfg.sweep.max_step;
    Trajectory traj =
        sweep_field(res, ctx.cfg.sweep.field_min, ctx.cfg.sweep.field_max, sc, ctx.cfg.contour);
    std::vector<VortexPath> paths = track_vortices(vs, traj, mp, ctx.cfg.contour);
    for (size_t k = 0; k < paths.size(); ++k) {
        Table pt;
        pt.comments = {"vortex " + std::to_string(k + 1) + " path",
                       "columns: field, x, y"};
        Column pf{"field", {}}, px{"x", {}}, py{"y", {}};
        for (const VortexTrackPoint& p : paths[k]) {
            pf.values.push_back(p.field);
            px.values.push_back(p.vortex.position.x);
            py.values.push_back(p.vortex.position.y);
        }
        pt.columns = {pf, px, py};
        emit(ctx, task, "vortex_path_" + std::to_string(k) + ".csv", pt);
    }
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

void task_phase_map(Ctx& ctx) {
    TaskRecord task;
    task.name = "phase-map";
    const double t0 = now_ms();
    auto [field, res] = resolve_state(ctx.cfg);
    ModelParams mp = ctx.cfg.model;
    mp.field = field;
    const WindowBlock& w = ctx.cfg.window;
    std::vector<Vortex> vs =
        locate_vortices(window_rect(w), std::min(w.nx, 81), std::min(w.ny, 81), res.energy,
                        mp, ctx.cfg.contour);
    PhaseMap pm = phase_map(window_rect(w), w.nx, w.ny, res.energy, mp, ctx.cfg.contour, vs);

    Table t;
    t.comments = {"phase map, row-major", "columns: x, y, phase"};
    Column cx{"x", {}}, cy{"y", {}}, cs{"phase", {}};
    for (int iy = 0; iy < pm.grid.ny; ++iy)
        for (int ix = 0; ix < pm.grid.nx; ++ix) {
            cx.values.push_back(pm.grid.x_at(ix));
            cy.values.push_back(pm.grid.y_at(iy));
            cs.values.push_back(pm.phase[size_t(iy) * pm.grid.nx + ix]);
        }
    t.columns = {cx, cy, cs};
    emit(ctx, task, "phase_map.csv", t);

    Table te;
    te.comments = {"phase discontinuity edges", "columns: line_id, ix0, iy0, ix1, iy1"};
    Column li{"line_id", {}}, a0{"ix0", {}}, b0{"iy0", {}}, a1{"ix1", {}}, b1{"iy1", {}};
    for (size_t l = 0; l < pm.lines.size(); ++l)
        for (const DiscontinuityEdge& e : pm.lines[l].edges) {
            li.values.push_back(double(l));
            a0.values.push_back(e.ix0);
            b0.values.push_back(e.iy0);
            a1.values.push_back(e.ix1);
            b1.values.push_back(e.iy1);
        }
    te.columns = {li, a0, b0, a1, b1};
    emit(ctx, task, "phase_edges.csv", te);

    Table tl;
    tl.comments = {"discontinuity lines; endpoint codes 0=vortex 1=antivortex 2=boundary 3=unresolved",
                   "columns: line_id, n_edges, end_a, end_b"};
    Column l2{"line_id", {}}, ne{"n_edges", {}}, ea{"end_a", {}}, eb{"end_b", {}};
    for (size_t l = 0; l < pm.lines.size(); ++l) {
        l2.values.push_back(double(l));
        ne.values.push_back(double(pm.lines[l].edges.size()));
        ea.values.push_back(double(int(pm.lines[l].end_a)));
        eb.values.push_back(double(int(pm.lines[l].end_b)));
    }
    tl.columns = {l2, ne, ea, eb};
    emit(ctx, task, "phase_lines.csv", tl);
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

void task_quiver(Ctx& ctx) {
    TaskRecord task;
    task.name = "quiver";
    const double t0 = now_ms();
    auto [field, res] = resolve_state(ctx.cfg);
    ModelParams mp = ctx.cfg.model;
    mp.field = field;
    const WindowBlock& w = ctx.cfg.window;
    std::vector<Vortex> vs =
        locate_vortices(window_rect(w), 61, 61, res.energy, mp, ctx.cfg.contour);
    GaugePotential gauge;
    Table t;
    t.comments = {"probability velocity; points near zeros and the impurity are omitted",
                  "columns: x, y, vx, vy"};
    Column cx{"x", {}}, cy{"y", {}}, cvx{"vx", {}}, cvy{"vy", {}};
    constexpr double kMaskRadius = 0.12;
    for (int iy = 0; iy < w.ny; ++iy) {
        const double y = w.ymin + (w.ymax - w.ymin) * iy / (w.ny - 1);
        for (int ix = 0; ix < w.nx; ++ix) {
            const double x = w.xmin + (w.xmax - w.xmin) * ix / (w.nx - 1);
            if (x * x + y * y < kOriginGuardRadius * kOriginGuardRadius) continue;
            bool masked = false;
            for (const Vortex& v : vs)
                if (dist2({x, y}, v.position) < kMaskRadius * kMaskRadius) masked = true;
            if (masked) continue;
            try {
                const Point2 vv = velocity_at({x, y}, res.energy, mp, ctx.cfg.contour, gauge);
                cx.values.push_back(x);
                cy.values.push_back(y);
                cvx.values.push_back(vv.x);
                cvy.values.push_back(vv.y);
            } catch (const VortexProximityError&) {
                // masked by omission
            }
        }
    }
    t.columns = {cx, cy, cvx, cvy};
    emit(ctx, task, "quiver.csv", t);
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);
}

// Paper-parameter composite run: seeds fanned around the n = 3 level at a
// mid-range field, every state swept, the stabilizing one refined, then all
// figure data emitted at the quoted field 0.1555.
RunConfig reproduce_config() {
    RunConfig cfg;
    cfg.model.field = 0.08;
    cfg.model.binding_energy = -6.4;
    cfg.seeds_re = {6.95, 6.90, 6.85, 7.05, 7.10, 7.15, 7.20, 7.25};
    cfg.seed_im = -1e-3;
    cfg.sweep.field_min = 0.02;
    cfg.sweep.field_max = 0.30;
    cfg.sweep.initial_step = 0.01;
    cfg.window = {-5.0, 5.0, -5.0, 5.0, 201, 201};
    cfg.stabilization = {0.10, 0.20, 1e-7};
    return cfg;
}

void task_reproduce(Ctx& ctx) {
    ctx.cfg = reproduce_config();
    ctx.config_echo = "builtin:reproduce-paper";

    // keep only the field-induced states near the level
    std::vector<Resonance> roots = refine_seeds(ctx.cfg);
    std::vector<Resonance> band;
    for (const Resonance& r : roots)
        if (std::abs(r.energy.real() - 7.0) < 0.45) band.push_back(r);
    if (band.empty()) throw ConvergenceError("no field-induced state found near the level");

    TaskRecord task;
    task.name = "reproduce-paper";
    const double t0 = now_ms();
    StepControl sc;
    sc.initial_step = ctx.cfg.sweep.initial_step;
    sc.max_step = ctx.cfg.sweep.max_step;

    // sweep every state; the stabilizing one has an interior |Im| minimum
    int stab_index = -1;
    double best_min = 1e300;
    std::vector<Trajectory> trajs;
    for (size_t k = 0; k < band.size(); ++k) {
        Trajectory traj = sweep_field(band[k], ctx.cfg.sweep.field_min,
                                      ctx.cfg.sweep.field_max, sc, ctx.cfg.contour);
        emit_sweep_files(ctx, task, traj, int(k));
        size_t arg = 0;
        for (size_t i = 0; i < traj.points.size(); ++i)
            if (std::abs(traj.points[i].resonance.energy.imag()) <
                std::abs(traj.points[arg].resonance.energy.imag()))
                arg = i;
        const bool interior = arg > 0 && arg + 1 < traj.points.size();
        const double m = std::abs(traj.points[arg].resonance.energy.imag());
        if (interior && m < best_min) {
            best_min = m;
            stab_index = int(k);
        }
        trajs.push_back(std::move(traj));
    }
    if (stab_index < 0) throw ConvergenceError("no swept state shows an interior width minimum");
    task.notes.push_back("stabilizing track: " + std::to_string(stab_index));

    Stabilization st = find_stabilization(band[stab_index], ctx.cfg.stabilization.bracket_lo,
                                          ctx.cfg.stabilization.bracket_hi,
                                          ctx.cfg.stabilization.tol_field, ctx.cfg.contour);
    task.notes.push_back("stabilization field: " + format_g9(st.field));
    task.notes.push_back("resonance energy: " + format_g9(st.resonance.energy.real()) + " " +
                         format_g9(st.resonance.energy.imag()) + "i");
    task.wall_ms = now_ms() - t0;
    ctx.manifest.tasks.push_back(task);

    // figure data at the paper's quoted field
    RunConfig at_star = ctx.cfg;
    at_star.model.field = 0.1555;
    at_star.seeds_re = {st.resonance.energy.real()};
    at_star.seed_im = std::min(st.resonance.energy.imag(), -1e-12);
    at_star.stabilization.bracket_lo = at_star.stabilization.bracket_hi = 0.0;
    at_star.sweep = {0.12, 0.19, 0.005, 0.005};

    Ctx sub = ctx;
    sub.cfg = at_star;
    sub.manifest = ctx.manifest;
    task_resonance(sub);
    task_wavefunction(sub);
    RunConfig wf = at_star;
    wf.window.nx = 501;
    sub.cfg = wf;
    sub.cfg.window.nx = 501;
    task_vortices(sub);
    sub.cfg.window = {-5.0, 5.0, -5.0, 5.0, 101, 101};
    task_phase_map(sub);
    sub.cfg.window = {-5.0, 5.0, -5.0, 5.0, 41, 41};
    task_quiver(sub);
    ctx.manifest = sub.manifest;
}

int dispatch(const std::string& cmd, Ctx& ctx) {
    if (cmd == "resonance") task_resonance(ctx);
    else if (cmd == "sweep") task_sweep(ctx);
    else if (cmd == "wavefunction") task_wavefunction(ctx);
    else if (cmd == "vortices") task_vortices(ctx);
    else if (cmd == "phase-map") task_phase_map(ctx);
    else if (cmd == "quiver") task_quiver(ctx);
    else if (cmd == "reproduce-paper") task_reproduce(ctx);
    ctx.manifest.tool_version = kVersion;
    ctx.manifest.config_echo = ctx.config_echo;
    write_manifest((fs::path(ctx.out_dir) / "manifest.json").string(), ctx.manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonance stabilization and quantum vortex analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int threads = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker thread count (0 = library default)");
    app.add_flag("--verbose", verbose, "chatty progress output");

    for (const char* name : {"resonance", "sweep", "wavefunction", "vortices", "phase-map",
                             "quiver", "reproduce-paper"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Ctx ctx;
        ctx.out_dir = out_dir;
        ctx.verbose = verbose;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw std::ios_base::failure("cannot create output directory: " + out_dir);
        if (cmd != "reproduce-paper") {
            if (config_path.empty()) {
                std::cerr << "error: --config is required for '" << cmd << "'\n";
                return 2;
            }
            ctx.cfg = load_config(config_path);
            std::ifstream in(config_path, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            ctx.config_echo = ss.str();
        }
        return dispatch(cmd, ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const LostTrackError& e) {
        std::cerr << "tracking error: " << e.what() << "\n";
        return 5;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
