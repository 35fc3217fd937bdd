// Command-line front end for the transport library.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lopt/lopt.hpp"
#include "lopt/experiments.hpp"
#include "lopt/io.hpp"

namespace fs = std::filesystem;
using lopt::io::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void ensure_directory(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw lopt::InputError("cannot create directory " + dir.string());
    }
}

void emit(const std::optional<std::string>& out, const std::string& text)
{
    if (out) {
        lopt::io::write_text(*out, text);
    } else {
        std::cout << text;
    }
}

std::string fmt_real(double v)
{
    return lopt::io::format_double(v);
}

struct GenerateArgs
{
    int n = 100;
    int k = 2;
    std::uint64_t seed = 0;
    std::string out;
};

void run_generate(const GenerateArgs& a)
{
    const auto corpus = lopt::experiments::gaussian_corpus(a.n, a.k, a.seed);
    ensure_directory(a.out);
    json means = json::array();
    for (std::size_t i = 0; i < corpus.measures.size(); ++i) {
        lopt::io::write_measure_csv(fs::path(a.out) / fmt::format("measure_{}.csv", i), corpus.measures[i]);
        means.push_back({corpus.means[i].x(), corpus.means[i].y()});
    }
    lopt::io::write_measure_csv(fs::path(a.out) / "reference.csv", corpus.reference);
    lopt::io::write_json(fs::path(a.out) / "params.json",
                         {{"command", "generate-gaussians"},
                          {"n", a.n},
                          {"k", a.k},
                          {"seed", a.seed},
                          {"means", means},
                          {"reference_mean", {corpus.reference_mean.x(), corpus.reference_mean.y()}}});
}

struct NoiseArgs
{
    std::string input;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::vector<double> box_lo;
    std::vector<double> box_hi;
};

void run_noise(const NoiseArgs& a)
{
    const auto mu = lopt::io::read_measure_csv(a.input);
    std::optional<lopt::experiments::Box> box;
    if (!a.box_lo.empty() || !a.box_hi.empty()) {
        lopt::detail::require(static_cast<lopt::Index>(a.box_lo.size()) == mu.dim()
                                  && static_cast<lopt::Index>(a.box_hi.size()) == mu.dim(),
                              "--box-lo and --box-hi need one value per coordinate");
        box = lopt::experiments::Box{Eigen::Map<const Eigen::VectorXd>(a.box_lo.data(), mu.dim()),
                                     Eigen::Map<const Eigen::VectorXd>(a.box_hi.data(), mu.dim())};
    }
    lopt::io::write_measure_csv(a.out, lopt::experiments::add_uniform_noise(mu, a.eta, a.seed, box));
}

struct SolveArgs
{
    std::string source;
    std::string target;
    std::optional<double> lambda;
    std::optional<std::string> out;
};

void run_solve_ot(const SolveArgs& a)
{
    const auto sol = lopt::solve_ot(lopt::io::read_measure_csv(a.source), lopt::io::read_measure_csv(a.target));
    std::cout << "cost," << fmt_real(sol.cost) << "\n";
    if (a.out) {
        lopt::io::write_json(*a.out, lopt::io::plan_to_json(sol.plan));
    }
}

void run_solve_opt(const SolveArgs& a)
{
    const auto sol = lopt::solve_opt(lopt::io::read_measure_csv(a.source), lopt::io::read_measure_csv(a.target),
                                     *a.lambda);
    std::cout << "cost," << fmt_real(sol.cost) << "\n"
              << "transported_mass," << fmt_real(sol.transported_mass) << "\n"
              << "destroyed_mass," << fmt_real(sol.destroyed_mass) << "\n"
              << "created_mass," << fmt_real(sol.created_mass) << "\n";
    if (a.out) {
        lopt::io::write_json(*a.out, lopt::io::plan_to_json(sol.plan));
    }
}

struct ProjectArgs
{
    std::string reference;
    std::string target;
    std::optional<double> lambda;
    std::optional<std::string> plan;
    std::string out;
};

void run_project(const ProjectArgs& a)
{
    const auto ref = lopt::io::read_measure_csv(a.reference);
    const auto target = lopt::io::read_measure_csv(a.target);
    std::optional<lopt::Plan> plan;
    if (a.plan) {
        plan = lopt::io::plan_from_json(lopt::io::read_json(*a.plan));
    }
    lopt::ProjectedMeasure<double> projected = [&] {
        if (a.lambda) {
            return lopt::opt_barycentric_projection(ref, target,
                                                    plan ? *plan : lopt::solve_opt(ref, target, *a.lambda).plan);
        }
        return lopt::ot_barycentric_projection(ref, target, plan ? *plan : lopt::solve_ot(ref, target).plan);
    }();
    lopt::io::write_measure_csv(a.out, projected.measure);
    std::cout << "deficit," << fmt_real(projected.deficit) << "\n";
}

struct EmbedArgs
{
    std::string reference;
    std::string target;
    std::optional<double> lambda;
    std::string out;
};

void run_embed(const EmbedArgs& a)
{
    const auto ref = lopt::io::read_measure_csv(a.reference);
    const auto target = lopt::io::read_measure_csv(a.target);
    if (a.lambda) {
        lopt::io::write_json(a.out, lopt::io::embedding_to_json(lopt::lopt_embed(ref, target, *a.lambda)));
    } else {
        lopt::io::write_json(a.out, lopt::io::embedding_to_json(lopt::lot_embed(ref, target)));
    }
}

struct DiscrepancyArgs
{
    std::string a;
    std::string b;
    std::string reference;
    bool include_deficit = false;
};

void run_discrepancy(const DiscrepancyArgs& a)
{
    const auto ref = lopt::io::read_measure_csv(a.reference);
    const auto ja = lopt::io::read_json(a.a);
    const auto jb = lopt::io::read_json(a.b);
    lopt::detail::require(lopt::io::is_lot_embedding(ja) == lopt::io::is_lot_embedding(jb),
                          "cannot compare an LOT embedding with an LOPT embedding");
    double value = 0.0;
    if (lopt::io::is_lot_embedding(ja)) {
        value = lopt::lot_discrepancy(lopt::io::lot_embedding_from_json(ja), lopt::io::lot_embedding_from_json(jb),
                                      ref);
    } else {
        value = lopt::lopt_discrepancy(lopt::io::lopt_embedding_from_json(ja),
                                       lopt::io::lopt_embedding_from_json(jb), ref, a.include_deficit);
    }
    std::cout << fmt_real(value) << "\n";
}

struct InterpolateArgs
{
    std::string mode;
    std::string source;
    std::string target;
    std::optional<std::string> reference;
    std::optional<double> lambda;
    std::string ts = "0,0.25,0.5,0.75,1";
    std::string out;
};

void run_interpolate(const InterpolateArgs& a)
{
    const auto mode = lopt::parse_interpolation_mode(a.mode);
    const auto ts = lopt::io::parse_real_list(a.ts);
    lopt::detail::require(!ts.empty(), "--ts must list at least one time");
    for (double t : ts) {
        lopt::InterpolationRequest{mode, t, a.lambda}.validate();
    }
    if (lopt::needs_reference(mode)) {
        lopt::detail::require(a.reference.has_value(), "this mode needs --reference");
    }
    const auto source = lopt::io::read_measure_csv(a.source);
    const auto target = lopt::io::read_measure_csv(a.target);

    std::vector<lopt::Measure> curve;
    switch (mode) {
    case lopt::InterpolationMode::ot_geodesic:
        curve = lopt::ot_geodesic<double>(source, target, ts);
        break;
    case lopt::InterpolationMode::opt_interp:
        curve = lopt::opt_interpolate<double>(source, target, *a.lambda, ts);
        break;
    case lopt::InterpolationMode::lot_geodesic: {
        const auto ref = lopt::io::read_measure_csv(*a.reference);
        const auto ea = lopt::lot_embed(ref, source);
        const auto eb = lopt::lot_embed(ref, target);
        for (double t : ts) {
            curve.push_back(lopt::lot_geodesic(ea, eb, ref, t));
        }
        break;
    }
    case lopt::InterpolationMode::lopt_interp: {
        const auto ref = lopt::io::read_measure_csv(*a.reference);
        const auto ea = lopt::lopt_embed(ref, source, *a.lambda);
        const auto eb = lopt::lopt_embed(ref, target, *a.lambda);
        for (double t : ts) {
            curve.push_back(lopt::lopt_interpolate(ea, eb, ref, t));
        }
        break;
    }
    }

    ensure_directory(a.out);
    json files = json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const std::string name = fmt::format("t_{:03d}.csv", i);
        lopt::io::write_measure_csv(fs::path(a.out) / name, curve[i]);
        files.push_back(name);
    }
    json manifest = {{"mode", std::string(lopt::to_string(mode))}, {"ts", ts}, {"files", files}};
    manifest["lambda"] = a.lambda ? json(*a.lambda) : json(nullptr);
    lopt::io::write_json(fs::path(a.out) / "manifest.json", manifest);
}

struct BarycenterArgs
{
    std::vector<std::string> inputs;
    int support_size = 50;
    int iters = 10;
    std::uint64_t seed = 0;
    double mass = 1.0;
    bool normalize = false;
    std::string out;
};

void run_barycenter(const BarycenterArgs& a)
{
    std::vector<lopt::Measure> measures;
    for (const auto& path : a.inputs) {
        auto mu = lopt::io::read_measure_csv(path);
        if (a.normalize) {
            const double m = lopt::total_mass(mu);
            lopt::detail::require(m > 0.0, "cannot normalize a massless measure");
            mu = mu.scaled(1.0 / m);
        }
        measures.push_back(std::move(mu));
    }
    lopt::detail::require(a.mass > 0.0, "--mass must be positive");
    std::vector<double> objective;
    const auto bary = lopt::ot_barycenter<double>(measures, a.support_size, a.iters, a.seed, &objective);
    const double m = lopt::total_mass(bary);
    lopt::io::write_measure_csv(a.out, bary.scaled(a.mass / m));
    for (std::size_t i = 0; i < objective.size(); ++i) {
        std::cout << "objective," << i << "," << fmt_real(objective[i]) << "\n";
    }
}

struct PcaArgs
{
    std::string reference;
    std::vector<std::string> embeddings;
    int components = 2;
    std::vector<std::string> labels;
    std::optional<std::string> out;
};

void run_pca(const PcaArgs& a)
{
    const auto ref = lopt::io::read_measure_csv(a.reference);
    const auto id = lopt::reference_id(ref);
    lopt::detail::require(!a.embeddings.empty(), "pca needs at least one embedding");
    lopt::detail::require(a.labels.empty() || a.labels.size() == a.embeddings.size(),
                          "--labels needs one label per embedding");

    const lopt::Index dim = ref.size() * ref.dim();
    lopt::PointMatrix<double> vectors(static_cast<lopt::Index>(a.embeddings.size()), dim);
    for (std::size_t i = 0; i < a.embeddings.size(); ++i) {
        const auto j = lopt::io::read_json(a.embeddings[i]);
        const lopt::PointMatrix<double> u = lopt::io::is_lot_embedding(j)
                                                ? lopt::io::lot_embedding_from_json(j).u
                                                : lopt::io::lopt_embedding_from_json(j).u;
        const auto hash = lopt::ReferenceId::from_hex(j.at("reference_hash").get<std::string>());
        lopt::detail::require(hash == id && u.rows() == ref.size() && u.cols() == ref.dim(),
                              "embedding was built against a different reference");
        vectors.row(static_cast<lopt::Index>(i)) = lopt::flatten_embedding(u);
    }
    const auto result = lopt::pca(vectors, ref.weights(), a.components);

    std::string csv;
    for (int c = 0; c < a.components; ++c) {
        csv += fmt::format("pc{},", c + 1);
    }
    csv += "label\n";
    for (lopt::Index i = 0; i < result.projections.rows(); ++i) {
        for (int c = 0; c < a.components; ++c) {
            csv += fmt_real(result.projections(i, c)) + ",";
        }
        csv += a.labels.empty() ? fs::path(a.embeddings[static_cast<std::size_t>(i)]).stem().string()
                                : a.labels[static_cast<std::size_t>(i)];
        csv += "\n";
    }
    emit(a.out, csv);
}

struct BenchErrorArgs
{
    int n = 100;
    int k = 2;
    std::string lambdas = "0.5,1,5,10,20";
    int trials = 10;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

void run_bench_error(const BenchErrorArgs& a)
{
    const auto lambdas = lopt::io::parse_real_list(a.lambdas);
    const auto records = lopt::experiments::bench_relative_error(a.n, a.k, lambdas, a.trials, a.seed);
    emit(a.out, lopt::experiments::records_to_csv(records));
    if (a.out) {
        lopt::io::write_json(*a.out + ".json", {{"command", "bench relative-error"},
                                                {"n", a.n},
                                                {"k", a.k},
                                                {"lambdas", lambdas},
                                                {"trials", a.trials},
                                                {"seed", a.seed},
                                                {"include_deficit", true}});
    }
}

struct BenchTimingArgs
{
    int n = 100;
    int k = 8;
    double lambda = 5.0;
    std::uint64_t seed = 0;
    int repeats = 1;
    std::optional<std::string> out;
};

void run_bench_timing(const BenchTimingArgs& a)
{
    const auto records = lopt::experiments::bench_timing(a.n, a.k, a.lambda, a.seed, a.repeats);
    emit(a.out, lopt::experiments::records_to_csv(records));
    if (a.out) {
        lopt::io::write_json(*a.out + ".json", {{"command", "bench timing"},
                                                {"n", a.n},
                                                {"k", a.k},
                                                {"lambda", a.lambda},
                                                {"seed", a.seed},
                                                {"repeats", a.repeats}});
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact optimal (partial) transport, LOT/LOPT embeddings and interpolation"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_gen = app.add_subcommand("generate-gaussians", "Sample K Gaussian point sets and a reference");
    cmd_gen->add_option("--n", gen.n, "Points per measure")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--k", gen.k, "Number of measures")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--seed", gen.seed, "RNG seed");
    cmd_gen->add_option("--out", gen.out, "Output directory")->required();

    NoiseArgs noise;
    auto* cmd_noise = app.add_subcommand("add-noise", "Append uniform noise atoms of total mass eta");
    cmd_noise->add_option("input", noise.input, "Point-set CSV")->required();
    cmd_noise->add_option("--eta", noise.eta, "Noise mass relative to the atom count")->required();
    cmd_noise->add_option("--seed", noise.seed, "RNG seed");
    cmd_noise->add_option("--box-lo", noise.box_lo, "Lower corner of the noise box")->delimiter(',');
    cmd_noise->add_option("--box-hi", noise.box_hi, "Upper corner of the noise box")->delimiter(',');
    cmd_noise->add_option("--out", noise.out, "Output CSV")->required();

    SolveArgs solve_ot_args;
    auto* cmd_ot = app.add_subcommand("solve-ot", "Exact balanced optimal transport");
    cmd_ot->add_option("source", solve_ot_args.source)->required();
    cmd_ot->add_option("target", solve_ot_args.target)->required();
    cmd_ot->add_option("--out", solve_ot_args.out, "Plan JSON output");

    SolveArgs solve_opt_args;
    auto* cmd_opt = app.add_subcommand("solve-opt", "Exact optimal partial transport");
    cmd_opt->add_option("source", solve_opt_args.source)->required();
    cmd_opt->add_option("target", solve_opt_args.target)->required();
    cmd_opt->add_option("--lambda", solve_opt_args.lambda, "Creation/destruction penalty")->required();
    cmd_opt->add_option("--out", solve_opt_args.out, "Plan JSON output");

    ProjectArgs project;
    auto* cmd_project = app.add_subcommand("project", "Barycentric projection onto the reference support");
    cmd_project->add_option("target", project.target)->required();
    cmd_project->add_option("--reference", project.reference)->required();
    cmd_project->add_option("--lambda", project.lambda, "Use the OPT projection with this penalty");
    cmd_project->add_option("--plan", project.plan, "Use this plan JSON instead of solving");
    cmd_project->add_option("--out", project.out, "Projected point-set CSV")->required();

    EmbedArgs embed;
    auto* cmd_embed = app.add_subcommand("embed", "LOT (no --lambda) or LOPT embedding");
    cmd_embed->add_option("target", embed.target)->required();
    cmd_embed->add_option("--reference", embed.reference)->required();
    cmd_embed->add_option("--lambda", embed.lambda);
    cmd_embed->add_option("--out", embed.out, "Embedding JSON")->required();

    DiscrepancyArgs disc;
    auto* cmd_disc = app.add_subcommand("discrepancy", "LOT/LOPT discrepancy between two embeddings");
    cmd_disc->add_option("a", disc.a)->required();
    cmd_disc->add_option("b", disc.b)->required();
    cmd_disc->add_option("--reference", disc.reference)->required();
    cmd_disc->add_flag("--include-deficit", disc.include_deficit, "Add lambda (deficit_a + deficit_b)");

    InterpolateArgs interp;
    auto* cmd_interp = app.add_subcommand("interpolate", "Write an interpolation curve as per-t CSVs");
    cmd_interp->add_option("--mode", interp.mode, "ot_geodesic | lot_geodesic | opt_interp | lopt_interp")
        ->required();
    cmd_interp->add_option("source", interp.source)->required();
    cmd_interp->add_option("target", interp.target)->required();
    cmd_interp->add_option("--reference", interp.reference);
    cmd_interp->add_option("--lambda", interp.lambda);
    cmd_interp->add_option("--ts", interp.ts, "Comma-separated times in [0, 1]");
    cmd_interp->add_option("--out", interp.out, "Output directory")->required();

    BarycenterArgs bary;
    auto* cmd_bary = app.add_subcommand("barycenter", "Free-support OT barycenter");
    cmd_bary->add_option("inputs", bary.inputs)->required();
    cmd_bary->add_option("--support-size", bary.support_size)->check(CLI::PositiveNumber);
    cmd_bary->add_option("--iters", bary.iters)->check(CLI::PositiveNumber);
    cmd_bary->add_option("--seed", bary.seed);
    cmd_bary->add_option("--mass", bary.mass, "Total mass of the written barycenter");
    cmd_bary->add_flag("--normalize", bary.normalize, "Rescale inputs to unit mass first");
    cmd_bary->add_option("--out", bary.out)->required();

    PcaArgs pca_args;
    auto* cmd_pca = app.add_subcommand("pca", "PCA over embedding displacement fields");
    cmd_pca->add_option("embeddings", pca_args.embeddings)->required();
    cmd_pca->add_option("--reference", pca_args.reference)->required();
    cmd_pca->add_option("--components", pca_args.components)->check(CLI::PositiveNumber);
    cmd_pca->add_option("--labels", pca_args.labels)->delimiter(',');
    cmd_pca->add_option("--out", pca_args.out);

    auto* cmd_bench = app.add_subcommand("bench", "Benchmarks");
    cmd_bench->require_subcommand(1);

    BenchErrorArgs berr;
    auto* cmd_berr = cmd_bench->add_subcommand("relative-error", "Mean relative error of LOPT against OPT");
    cmd_berr->add_option("--n", berr.n)->check(CLI::PositiveNumber);
    cmd_berr->add_option("--k", berr.k)->check(CLI::Range(2, 1 << 20));
    cmd_berr->add_option("--lambdas", berr.lambdas, "Comma-separated lambda sweep");
    cmd_berr->add_option("--lambda", berr.lambdas, "Alias of --lambdas");
    cmd_berr->add_option("--trials", berr.trials)->check(CLI::PositiveNumber);
    cmd_berr->add_option("--seed", berr.seed);
    cmd_berr->add_option("--out", berr.out);

    BenchTimingArgs btime;
    auto* cmd_btime = cmd_bench->add_subcommand("timing", "Wall clock of pairwise OPT vs LOPT");
    cmd_btime->add_option("--n", btime.n)->check(CLI::PositiveNumber);
    cmd_btime->add_option("--k", btime.k)->check(CLI::PositiveNumber);
    cmd_btime->add_option("--lambda", btime.lambda);
    cmd_btime->add_option("--seed", btime.seed);
    cmd_btime->add_option("--repeats", btime.repeats)->check(CLI::PositiveNumber);
    cmd_btime->add_option("--out", btime.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*cmd_gen) run_generate(gen);
        else if (*cmd_noise) run_noise(noise);
        else if (*cmd_ot) run_solve_ot(solve_ot_args);
        else if (*cmd_opt) run_solve_opt(solve_opt_args);
        else if (*cmd_project) run_project(project);
        else if (*cmd_embed) run_embed(embed);
        else if (*cmd_disc) run_discrepancy(disc);
        else if (*cmd_interp) run_interpolate(interp);
        else if (*cmd_bary) run_barycenter(bary);
        else if (*cmd_pca) run_pca(pca_args);
        else if (*cmd_berr) run_bench_error(berr);
        else if (*cmd_btime) run_bench_timing(btime);
    } catch (const lopt::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const lopt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
