// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "wtflow/checkpoint.hpp"
#include "wtflow/container.hpp"
#include "wtflow/csv.hpp"
#include "wtflow/diag.hpp"
#include "wtflow/error.hpp"
#include "wtflow/flow.hpp"
#include "wtflow/scenario.hpp"
#include "wtflow/score.hpp"
#include "wtflow/train.hpp"
#include "wtflow/wt_map.hpp"

namespace wtflow::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
    std::size_t threads = 1;
};

std::uint64_t effective_seed(std::uint64_t seed) {
    const char* env = std::getenv(kSeedEnv);
    if (env == nullptr || *env == '\0') return seed;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::char_traits<char>::length(env)) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string(kSeedEnv) + " must be an unsigned integer");
    }
}

fs::path prepare_out(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

json shape_json(const Tensor& t) { return json(t.shape()); }

/// Location rows of `input` after the checkpoint's WT map.
Tensor mapped_rows(const Checkpoint& ckpt, const Tensor& input) {
    Tensor rows = to_location_rows(input);
    if (rows.cols() != ckpt.model.dim()) {
        throw FormatError("input has " + std::to_string(rows.cols()) + " channels but the checkpoint expects " +
                          std::to_string(ckpt.model.dim()));
    }
    return ckpt.wt ? apply_wt(rows, *ckpt.wt) : rows;
}

std::size_t locations_per_image(const Tensor& input) {
    return input.rank() == 4 ? input.dim(2) * input.dim(3) : 1;
}

// ---- gen-data ---------------------------------------------------------------

struct GenArgs {
    std::string scenario;
    std::uint64_t seed = 0;
    fs::path out;
    std::size_t n_train = 1024;
    std::size_t n_test = 512;
    std::string dtype = "f64";
};

json cmd_gen(const GenArgs& a) {
    const std::uint64_t seed = effective_seed(a.seed);
    const Dataset ds = gen_scenario(a.scenario, a.n_train, a.n_test, seed);
    const DType dtype = a.dtype == "f32" ? DType::F32 : DType::F64;
    const fs::path dir = prepare_out(a.out);
    write_container(dir / "train.ftc", ds.train, dtype);
    write_container(dir / "test.ftc", ds.test, dtype);
    write_labels(dir / "labels.csv", ds.test_labels);
    return {{"command", "gen-data"},       {"scenario", ds.name},
            {"seed", seed},                {"train_shape", shape_json(ds.train)},
            {"test_shape", shape_json(ds.test)}, {"out", dir.string()}};
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    fs::path config;
    fs::path out;
    std::optional<std::uint64_t> seed;
};

json cmd_train(const TrainArgs& a, std::ostream& err) {
    RunConfig cfg = load_run_config(a.config);
    if (a.seed) cfg.train.seed = *a.seed;
    cfg.train.seed = effective_seed(cfg.train.seed);
    if (!a.out.empty()) cfg.out_dir = a.out;
    const FeatureContainer data = read_container(cfg.data);
    const fs::path dir = prepare_out(cfg.out_dir);
    {
        std::ofstream f(dir / "config.json");
        f << to_json(cfg).dump(2) << '\n';
    }

    EpochCallback log;
    if (cfg.log_every > 0) {
        log = [&](const EpochReport& r) {
            if ((r.epoch + 1) % cfg.log_every == 0) {
                err << "epoch " << r.epoch + 1 << " loss " << format_double(r.mean_loss) << " lr "
                    << format_double(r.lr) << '\n';
            }
        };
    }

    TrainResult res = [&] {
        try {
            return train(data.tensor, cfg.train, cfg.model, log);
        } catch (const DivergenceError& e) {
            save_checkpoint(dir / "checkpoint.last_good.wtf", e.last_good());
            throw;
        }
    }();
    save_checkpoint(dir / "checkpoint.wtf", res.checkpoint);
    write_loss_csv(dir / "loss.csv", res.epoch_loss);
    return {{"command", "train"},
            {"seed", cfg.train.seed},
            {"epochs", res.epoch_loss.size()},
            {"steps", res.steps},
            {"initial_loss", res.epoch_loss.front()},
            {"final_loss", res.epoch_loss.back()},
            {"checkpoint", (dir / "checkpoint.wtf").string()},
            {"loss_csv", (dir / "loss.csv").string()}};
}

// ---- infer ------------------------------------------------------------------

struct InferArgs {
    fs::path ckpt;
    fs::path input;
    fs::path out;
    std::size_t steps = 50;
    bool record = false;
    std::size_t max_dump_dims = 8;
};

json cmd_infer(const InferArgs& a, const Common& c) {
    const Checkpoint ckpt = load_checkpoint(a.ckpt);
    const FeatureContainer in = read_container(a.input);
    const Tensor rows = mapped_rows(ckpt, in.tensor);
    const BatchTrajectory traj =
        integrate_euler_batch(rows, as_field(ckpt.model), a.steps, a.record, FlowOptions{c.threads});
    const fs::path dir = prepare_out(a.out);
    write_trajectory_csv(dir / "trajectory.csv", traj, a.max_dump_dims);
    write_container(dir / "endpoints.ftc", from_location_rows(traj.terminal(), in.tensor.shape()));
    double mean_norm = 0.0;
    for (double v : traj.norms.back()) mean_norm += v;
    mean_norm /= static_cast<double>(traj.batch_size());
    return {{"command", "infer"},
            {"locations", traj.batch_size()},
            {"steps", a.steps},
            {"mean_terminal_norm", mean_norm},
            {"endpoints", (dir / "endpoints.ftc").string()},
            {"trajectory_csv", (dir / "trajectory.csv").string()}};
}

// ---- score ------------------------------------------------------------------

struct ScoreArgs {
    fs::path ckpt;
    fs::path input;
    fs::path labels;
    fs::path mask;
    fs::path out;
    std::string mode = "wt";
    double kfrac = kDefaultTopKFraction;
    std::size_t steps = 50;
};

json cmd_score(const ScoreArgs& a, const Common& c) {
    const Checkpoint ckpt = load_checkpoint(a.ckpt);
    const Tensor input = read_container(a.input).tensor;
    const std::vector<int> labels = read_labels(a.labels);
    if (input.rank() < 1 || labels.size() != input.dim(0)) {
        throw FormatError("labels file has " + std::to_string(labels.size()) + " rows for " +
                          std::to_string(input.rank() ? input.dim(0) : 0) + " images");
    }
    if (to_location_rows(input).cols() != ckpt.model.dim()) {
        throw FormatError("input channels do not match the checkpoint");
    }
    const ScoreMode mode = parse_score_mode(a.mode);
    const Tensor maps = anomaly_map(input, ckpt, a.steps, mode, FlowOptions{c.threads});
    const std::vector<double> scores = image_scores(maps, a.kfrac);
    const double image_auc = auroc(scores, labels);

    const fs::path dir = prepare_out(a.out);
    write_scores_csv(dir / "scores.csv", labels, scores);
    write_container(dir / "maps.ftc", maps);
    json summary{{"command", "score"}, {"mode", to_string(mode)}, {"steps", a.steps},
                 {"kfrac", a.kfrac},   {"n_images", scores.size()}, {"auroc", image_auc}};
    if (!a.mask.empty()) {
        Tensor mask = read_container(a.mask).tensor;
        if (mask.size() != maps.size()) throw FormatError("mask does not match the anomaly map shape");
        summary["pixel_auroc"] = pixel_auroc(maps, mask.reshaped(maps.shape()));
    }
    {
        std::ofstream f(dir / "summary.json");
        f << summary.dump(2) << '\n';
    }
    summary["scores_csv"] = (dir / "scores.csv").string();
    summary["maps"] = (dir / "maps.ftc").string();
    summary["summary"] = (dir / "summary.json").string();
    return summary;
}

// ---- diagnose ---------------------------------------------------------------

struct DiagArgs {
    fs::path out;
    // annulus
    std::size_t dim = 512;
    std::size_t n = 100000;
    double beta = 3.0;
    std::uint64_t seed = 0;
    // kl
    double mean = 0.0;
    double stddev = 2.0;
    std::vector<double> eps;
    // marginal
    fs::path data;
    double t = 0.5;
    std::string path = "forward_rf";
    double path_eps = 0.0;
    std::size_t queries = 20;
    // normtable / radial / radius-bound
    fs::path ckpt;
    fs::path input;
    fs::path labels;
    std::size_t steps = 50;
    std::size_t stride = 5;
    std::optional<double> t_eval;
};

json cmd_annulus(const DiagArgs& a) {
    const std::uint64_t seed = effective_seed(a.seed);
    RandomStream rs(seed);
    const double frac = annulus_fraction(a.dim, a.n, a.beta, rs);
    const double oracle = chi_annulus_probability(a.dim, a.beta);
    const fs::path dir = prepare_out(a.out);
    write_csv(dir / "annulus.csv", {{"dim", "n", "beta", "fraction", "oracle"},
                                    {{std::to_string(a.dim), std::to_string(a.n), format_double(a.beta),
                                      format_double(frac), format_double(oracle)}}});
    return {{"command", "diagnose annulus"}, {"dim", a.dim}, {"n", a.n}, {"beta", a.beta},
            {"seed", seed}, {"fraction", frac}, {"oracle", oracle}};
}

json cmd_kl(const DiagArgs& a) {
    const std::vector<double> eps = a.eps.empty() ? default_kl_eps() : a.eps;
    const KlCurve curve = kl_perturbation_curve({a.mean, a.stddev}, eps);
    CsvTable t{{"eps", "kl"}, {}};
    for (std::size_t i = 0; i < curve.eps.size(); ++i) t.rows.push_back({format_double(curve.eps[i]), format_double(curve.kl[i])});
    const fs::path dir = prepare_out(a.out);
    write_csv(dir / "kl.csv", t);
    return {{"command", "diagnose kl"}, {"mean", a.mean}, {"std", a.stddev}, {"points", eps.size()},
            {"slope", std::isfinite(curve.slope) ? json(curve.slope) : json(nullptr)}};
}

json cmd_marginal(const DiagArgs& a) {
    const Tensor data = to_location_rows(read_container(a.data).tensor);
    PathSpec spec;
    spec.kind = parse_path_kind(a.path);
    spec.epsilon = a.path_eps;
    spec.validate();
    const std::uint64_t seed = effective_seed(a.seed);
    RandomStream rs(seed);
    const Tensor x = sample_standard_normal(rs, {a.queries, data.cols()});
    const Tensor u = marginal_field_oracle(x, a.t, data, spec);
    CsvTable t{{"query_id", "t"}, {}};
    const std::size_t d = data.cols();
    for (std::size_t j = 0; j < d; ++j) t.header.push_back("x_" + std::to_string(j));
    for (std::size_t j = 0; j < d; ++j) t.header.push_back("u_" + std::to_string(j));
    for (std::size_t q = 0; q < a.queries; ++q) {
        std::vector<std::string> row{std::to_string(q), format_double(a.t)};
        for (double v : x.row(q)) row.push_back(format_double(v));
        for (double v : u.row(q)) row.push_back(format_double(v));
        t.rows.push_back(std::move(row));
    }
    const fs::path dir = prepare_out(a.out);
    write_csv(dir / "marginal.csv", t);
    return {{"command", "diagnose marginal"}, {"queries", a.queries}, {"t", a.t}, {"path", to_string(spec.kind)},
            {"seed", seed}};
}

json cmd_normtable(const DiagArgs& a, const Common& c) {
    const Checkpoint ckpt = load_checkpoint(a.ckpt);
    const Tensor input = read_container(a.input).tensor;
    const Tensor rows = mapped_rows(ckpt, input);
    const VectorField field = as_field(ckpt.model);
    const FlowOptions opts{c.threads};

    NormTable table;
    table.steps = norm_table_steps(a.steps, a.stride);
    if (a.labels.empty()) {
        table.add_row("all", trajectory_norm_row(field, rows, a.steps, a.stride, opts));
    } else {
        const std::vector<int> labels = read_labels(a.labels);
        if (labels.size() != input.dim(0)) throw FormatError("labels do not match the input image count");
        const std::size_t per = locations_per_image(input);
        for (int cls : {0, 1}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] != cls) continue;
                for (std::size_t p = 0; p < per; ++p) idx.push_back(i * per + p);
            }
            if (idx.empty()) continue;
            table.add_row(cls == 0 ? "normal" : "anomalous",
                          trajectory_norm_row(field, gather_rows(rows, idx), a.steps, a.stride, opts));
        }
    }
    const fs::path dir = prepare_out(a.out);
    write_norm_table_csv(dir / "normtable.csv", table);
    json argmin = json::object();
    for (std::size_t r = 0; r < table.classes.size(); ++r) argmin[table.classes[r]] = table.argmin[r];
    return {{"command", "diagnose normtable"}, {"steps", a.steps}, {"stride", a.stride}, {"argmin_column", argmin}};
}

json cmd_radial(const DiagArgs& a) {
    const Checkpoint ckpt = load_checkpoint(a.ckpt);
    const Tensor rows = mapped_rows(ckpt, read_container(a.input).tensor);
    const double t_eval = a.t_eval.value_or(ckpt.path.t_min);
    const RadialStats st = initial_radial_stats(as_field(ckpt.model), rows, t_eval);
    const fs::path dir = prepare_out(a.out);
    write_csv(dir / "radial.csv", {{"t", "mean_radial", "fraction_inward", "counted", "skipped"},
                                   {{format_double(t_eval), format_double(st.mean_radial),
                                     format_double(st.fraction_inward), std::to_string(st.counted),
                                     std::to_string(st.skipped)}}});
    return {{"command", "diagnose radial"}, {"t", t_eval}, {"mean_radial", st.mean_radial},
            {"fraction_inward", st.fraction_inward}, {"counted", st.counted}, {"skipped", st.skipped}};
}

json cmd_radius_bound(const DiagArgs& a) {
    const RadiusBound rb = radius_bound_check(read_container(a.input).tensor);
    const fs::path dir = prepare_out(a.out);
    write_csv(dir / "radius_bound.csv", {{"max_norm", "sqrt_d", "violation"},
                                         {{format_double(rb.max_norm), format_double(rb.sqrt_d),
                                           rb.violation ? "1" : "0"}}});
    return {{"command", "diagnose radius-bound"}, {"max_norm", rb.max_norm}, {"sqrt_d", rb.sqrt_d},
            {"violation", rb.violation}};
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"wtflow: flow-matching anomaly lab"};
    app.name("wtflow");
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--threads", common.threads, "Worker cap for field evaluation")->check(CLI::PositiveNumber);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Write a seeded scenario as train/test containers and labels");
    gen_cmd->add_option("--scenario", gen.scenario, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--n-train", gen.n_train, "Training samples (images for feature scenarios)");
    gen_cmd->add_option("--n-test", gen.n_test, "Test samples (images for feature scenarios)");
    gen_cmd->add_option("--dtype", gen.dtype, "Container dtype")->check(CLI::IsMember({"f32", "f64"}));

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a vector field from a JSON run config");
    train_cmd->add_option("--config", tr.config, "Run config (JSON)")->required();
    train_cmd->add_option("--out", tr.out, "Override out_dir");
    train_cmd->add_option("--seed", tr.seed, "Override the config seed");

    InferArgs inf;
    auto* infer_cmd = app.add_subcommand("infer", "Integrate inputs through a trained field");
    infer_cmd->add_option("--ckpt", inf.ckpt, "Checkpoint")->required();
    infer_cmd->add_option("--input", inf.input, "Input container")->required();
    infer_cmd->add_option("--steps", inf.steps, "Euler steps")->check(CLI::PositiveNumber);
    infer_cmd->add_flag("--record", inf.record, "Record every step instead of endpoints only");
    infer_cmd->add_option("--out", inf.out, "Output directory")->required();
    infer_cmd->add_option("--max-dump-dims", inf.max_dump_dims, "Coordinates written per trajectory row");

    ScoreArgs sc;
    auto* score_cmd = app.add_subcommand("score", "Anomaly maps, top-k image scores and AUROC");
    score_cmd->add_option("--ckpt", sc.ckpt, "Checkpoint")->required();
    score_cmd->add_option("--input", sc.input, "Test container")->required();
    score_cmd->add_option("--labels", sc.labels, "Labels CSV (image_id,label)")->required();
    score_cmd->add_option("--mask", sc.mask, "Optional pixel mask container for pixel AUROC");
    score_cmd->add_option("--mode", sc.mode, "Scoring functional")->check(CLI::IsMember({"wt", "rfm"}));
    score_cmd->add_option("--kfrac", sc.kfrac, "Top-k fraction")->check(CLI::Range(1e-12, 1.0));
    score_cmd->add_option("--steps", sc.steps, "Euler steps")->check(CLI::PositiveNumber);
    score_cmd->add_option("--out", sc.out, "Output directory")->required();

    DiagArgs dg;
    auto* diag_cmd = app.add_subcommand("diagnose", "Diagnostics");
    diag_cmd->require_subcommand(1);
    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", dg.out, "Output directory")->required(); };

    auto* ann = diag_cmd->add_subcommand("annulus", "Gaussian annulus mass vs the chi oracle");
    ann->add_option("--dim", dg.dim, "Dimension")->check(CLI::PositiveNumber);
    ann->add_option("--n", dg.n, "Sample count")->check(CLI::PositiveNumber);
    ann->add_option("--beta", dg.beta, "Annulus half-width");
    ann->add_option("--seed", dg.seed, "Seed");
    add_out(ann);

    auto* kl = diag_cmd->add_subcommand("kl", "KL divergence under Gaussian perturbation");
    kl->add_option("--mean", dg.mean, "Mean of p0");
    kl->add_option("--std", dg.stddev, "Standard deviation of p0");
    kl->add_option("--eps", dg.eps, "Perturbation weights in [0, 0.1]")->delimiter(',');
    add_out(kl);

    auto* marg = diag_cmd->add_subcommand("marginal", "Closed-form marginal field of a finite dataset");
    marg->add_option("--data", dg.data, "Dataset container")->required();
    marg->add_option("--t", dg.t, "Time");
    marg->add_option("--path", dg.path, "Path kind")->check(CLI::IsMember({"forward_rf", "forward_ot", "reverse_rf"}));
    marg->add_option("--path-eps", dg.path_eps, "forward_ot noise floor");
    marg->add_option("--queries", dg.queries, "Random N(0, I) query points")->check(CLI::PositiveNumber);
    marg->add_option("--seed", dg.seed, "Seed");
    add_out(marg);

    auto* nt = diag_cmd->add_subcommand("normtable", "Mean trajectory norm per class over time");
    nt->add_option("--ckpt", dg.ckpt, "Checkpoint")->required();
    nt->add_option("--input", dg.input, "Input container")->required();
    nt->add_option("--labels", dg.labels, "Optional labels CSV (rows per class)");
    nt->add_option("--steps", dg.steps, "Euler steps")->check(CLI::PositiveNumber);
    nt->add_option("--stride", dg.stride, "Column spacing in steps")->check(CLI::PositiveNumber);
    add_out(nt);

    auto* rad = diag_cmd->add_subcommand("radial", "Initial radial velocity statistics");
    rad->add_option("--ckpt", dg.ckpt, "Checkpoint")->required();
    rad->add_option("--input", dg.input, "Input container")->required();
    rad->add_option("--t", dg.t_eval, "Evaluation time (default: checkpoint t_min)");
    add_out(rad);

    auto* rb = diag_cmd->add_subcommand("radius-bound", "Largest location norm vs sqrt(d)");
    rb->add_option("--input", dg.input, "Feature container")->required();
    add_out(rb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        json summary;
        if (*gen_cmd) summary = cmd_gen(gen);
        else if (*train_cmd) summary = cmd_train(tr, err);
        else if (*infer_cmd) summary = cmd_infer(inf, common);
        else if (*score_cmd) summary = cmd_score(sc, common);
        else if (*ann) summary = cmd_annulus(dg);
        else if (*kl) summary = cmd_kl(dg);
        else if (*marg) summary = cmd_marginal(dg);
        else if (*nt) summary = cmd_normtable(dg, common);
        else if (*rad) summary = cmd_radial(dg);
        else if (*rb) summary = cmd_radius_bound(dg);
        out << summary.dump() << '\n';
        return kExitOk;
    } catch (const SingularityError& e) {
        err << "wtflow: numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "wtflow: numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "wtflow: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace wtflow::cli
