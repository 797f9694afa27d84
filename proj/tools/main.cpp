// Command-line surface for the frequency-aware degradation toolkit:
// analyze images into restoration plans, synthesize labeled corpora,
// evaluate planner accuracy, run routing demos and tabulate spectral
// weights.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freqband/advloss.hpp"
#include "freqband/config.hpp"
#include "freqband/degrade.hpp"
#include "freqband/freqmoe.hpp"
#include "freqband/hints.hpp"
#include "freqband/parallel.hpp"
#include "freqband/planner.hpp"
#include "freqband/png_io.hpp"
#include "freqband/spectra.hpp"
#include "freqband/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace freqband;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    std::string out_path;
    int threads = 1;
};

CliConfig effective_config(const GlobalOpts& opts) {
    CliConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

void emit(const GlobalOpts& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + opts.out_path);
    out << text;
}

int cmd_analyze(const GlobalOpts& opts, const std::string& image_path) {
    const CliConfig cfg = effective_config(opts);
    const ImageBuffer img = read_png(image_path);
    const hints::DegradationHints h = hints::extract_hints(img);
    const planner::RestorationPlan plan = planner::plan(h, cfg.thresholds);

    json out = json::parse(planner::plan_to_json(plan));
    if (opts.verbose) out["hints"] = json::parse(hints::hints_to_json(h));

    std::ostringstream os;
    os << out.dump() << "\n" << planner::render_plan(plan) << "\n";
    emit(opts, os.str());
    return 0;
}

int cmd_synth(const GlobalOpts& opts, int n_per_class, const std::string& out_dir) {
    const CliConfig cfg = effective_config(opts);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {  // probe writability before the expensive generation
        std::ofstream probe(fs::path(out_dir) / ".write_probe", std::ios::binary);
        if (!probe) throw std::runtime_error("output directory is not writable: " + out_dir);
    }
    fs::remove(fs::path(out_dir) / ".write_probe", ec);

    const auto bases = degrade::builtin_bases(512, 4, cfg.seed);
    const auto corpus = degrade::make_corpus(bases, n_per_class, cfg.seed, opts.threads);

    std::vector<std::string> names(corpus.size());
    std::vector<int> class_index(planner::kTaskOrder.size(), 0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::size_t cls = i / std::max(1, n_per_class);
        std::ostringstream name;
        name << planner::task_name(planner::kTaskOrder[cls]) << "_";
        name.width(3);
        name.fill('0');
        name << (i % std::max(1, n_per_class)) << ".png";
        names[i] = name.str();
    }

    parallel_for(corpus.size(), opts.threads, [&](std::size_t i) {
        write_png((fs::path(out_dir) / names[i]).string(), corpus[i].image);
    });

    std::ofstream manifest(fs::path(out_dir) / "manifest.jsonl", std::ios::binary);
    if (!manifest) throw std::runtime_error("cannot write manifest in: " + out_dir);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        json line;
        line["path"] = names[i];
        line["task"] = planner::task_name(corpus[i].task);
        line["spec"] = json::parse(degrade::spec_to_json(corpus[i].spec));
        manifest << line.dump() << "\n";
    }

    json summary;
    summary["images"] = corpus.size();
    summary["manifest"] = (fs::path(out_dir) / "manifest.jsonl").string();
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_eval(const GlobalOpts& opts, const std::string& manifest_path) {
    const CliConfig cfg = effective_config(opts);

    std::ifstream manifest(manifest_path);
    if (!manifest) throw std::runtime_error("cannot open manifest: " + manifest_path);
    const fs::path root = fs::path(manifest_path).parent_path();

    struct Item {
        fs::path path;
        planner::TaskToken truth;
    };
    std::vector<Item> items;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        items.push_back({root / j.at("path").get<std::string>(),
                         planner::task_from_name(j.at("task").get<std::string>())});
    }

    constexpr int kNumTasks = 7;
    std::vector<int> predicted(items.size(), -1);  // -1: missing file
    parallel_for(items.size(), opts.threads, [&](std::size_t i) {
        if (!fs::exists(items[i].path)) return;
        const ImageBuffer img = read_png(items[i].path.string());
        const auto plan = planner::plan(hints::extract_hints(img), cfg.thresholds);
        predicted[i] = static_cast<int>(plan.task);
    });

    std::vector<std::vector<int>> confusion(kNumTasks, std::vector<int>(kNumTasks, 0));
    int missing = 0, correct = 0, evaluated = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (predicted[i] < 0) {
            ++missing;
            continue;
        }
        ++evaluated;
        const int truth = static_cast<int>(items[i].truth);
        confusion[truth][predicted[i]] += 1;
        if (truth == predicted[i]) ++correct;
    }

    json report;
    json order = json::array();
    for (auto t : planner::kTaskOrder) order.push_back(planner::task_name(t));
    report["task_order"] = order;
    report["confusion"] = confusion;
    json per_class;
    for (int t = 0; t < kNumTasks; ++t) {
        int row_sum = 0, col_sum = 0;
        for (int u = 0; u < kNumTasks; ++u) {
            row_sum += confusion[t][u];
            col_sum += confusion[u][t];
        }
        json entry;
        entry["support"] = row_sum;
        entry["recall"] = row_sum ? static_cast<double>(confusion[t][t]) / row_sum : 0.0;
        entry["precision"] = col_sum ? static_cast<double>(confusion[t][t]) / col_sum : 0.0;
        per_class[planner::task_name(static_cast<planner::TaskToken>(t))] = entry;
    }
    report["per_class"] = per_class;
    report["evaluated"] = evaluated;
    report["missing_files"] = missing;
    report["overall_accuracy"] =
        evaluated ? static_cast<double>(correct) / evaluated : 0.0;

    emit(opts, report.dump() + "\n");
    return 0;
}

moe::TokenSequence synth_sequence(const json& spec, std::uint64_t seed) {
    const int batch = spec.value("batch", 1);
    const int length = spec.value("length", 32);
    const int dim = spec.value("dim", 8);
    const std::string signal = spec.value("signal", "random");

    Rng rng(mix_seed(seed, 0x5E99ull));
    moe::TokenSequence x(batch, length, dim);
    std::vector<double> channel(dim);
    for (double& v : channel) v = rng.uniform(0.5, 1.5);

    for (int b = 0; b < batch; ++b) {
        for (int t = 0; t < length; ++t) {
            for (int d = 0; d < dim; ++d) {
                double v = 0.0;
                if (signal == "constant") {
                    v = channel[d];
                } else if (signal == "alternating" || signal == "highband") {
                    v = (t % 2 == 0 ? 1.0 : -1.0) * channel[d];
                } else if (signal == "lowband") {
                    v = channel[d] *
                        std::sin(2.0 * 3.14159265358979323846 * t / length + 0.3 * d);
                } else if (signal == "random") {
                    v = rng.normal();
                } else {
                    throw std::invalid_argument("route-demo: unknown signal kind: " + signal);
                }
                x.at(b, t, d) = v;
            }
        }
    }
    return x;
}

int cmd_route_demo(const GlobalOpts& opts, const std::string& spec_path,
                   const std::string& tensor_in, const std::string& tensor_out) {
    const CliConfig cfg = effective_config(opts);

    json spec = json::object();
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw std::runtime_error("cannot open route spec: " + spec_path);
        in >> spec;
    }

    const std::uint64_t seed = spec.value("seed", cfg.seed);
    moe::TokenSequence x =
        tensor_in.empty() ? synth_sequence(spec, seed) : load_tensor(tensor_in);
    if (!tensor_out.empty()) save_tensor(tensor_out, x);

    moe::RouterConfig router = cfg.router();
    if (spec.contains("temperature")) router.temperature = spec["temperature"].get<double>();

    const double lambda_s =
        spec.contains("lambda_s") ? spec["lambda_s"].get<double>() : router.lambda_s();
    const moe::GateGranularity granularity =
        spec.value("granularity", "sequence") == "token"
            ? moe::GateGranularity::kTokenWise
            : moe::GateGranularity::kSequenceLevel;

    const std::vector<double> plow = moe::spectral_plow(x, router);
    const moe::GateWeights w_visual = moe::spectral_gate(x, router);

    moe::GateWeights w_text;
    if (spec.contains("text")) {
        const int k = spec["text"].value("tokens", 4);
        const std::uint64_t tseed = spec["text"].value("seed", seed + 1);
        Rng rng(mix_seed(tseed, 0x7E27ull));
        moe::TokenSequence h_text(x.batch, k, x.dim);
        for (double& v : h_text.values) v = rng.normal();
        Eigen::MatrixXd weight(x.dim, 2);
        for (int r = 0; r < x.dim; ++r)
            for (int c = 0; c < 2; ++c) weight(r, c) = rng.normal();
        w_text = moe::text_gate(h_text, x.length, weight);
    } else {  // no text conditioning: uniform gates from a zero map
        moe::TokenSequence h_text(x.batch, 1, x.dim);
        w_text = moe::text_gate(h_text, x.length, Eigen::MatrixXd::Zero(x.dim, 2));
    }

    const moe::RoutingResult routed = moe::fuse_and_route(w_text, w_visual, lambda_s, granularity);

    auto gates_to_json = [](const moe::GateWeights& w) {
        json out = json::array();
        for (int b = 0; b < w.batch; ++b) {
            json rows = json::array();
            for (int l = 0; l < w.length; ++l) {
                json row = json::array();
                for (int n = 0; n < w.experts; ++n) row.push_back(w.at(b, l, n));
                rows.push_back(row);
            }
            out.push_back(rows);
        }
        return out;
    };

    json out;
    json plow_json = json::array();
    for (int b = 0; b < x.batch; ++b) {
        json row = json::array();
        for (int t = 0; t < x.length; ++t)
            row.push_back(plow[static_cast<std::size_t>(b) * x.length + t]);
        plow_json.push_back(row);
    }
    out["p_low"] = plow_json;
    out["w_visual"] = gates_to_json(w_visual);
    out["w_text"] = gates_to_json(w_text);
    out["fused"] = gates_to_json(routed.fused);
    out["lambda_s"] = lambda_s;
    json selection = json::array();
    for (int idx : routed.selection) {
        json pick;
        pick["expert"] = idx + 1;  // experts reported 1-based
        pick["band"] = idx == 0 ? "low" : "high";
        selection.push_back(pick);
    }
    out["selection"] = selection;

    emit(opts, out.dump() + "\n");
    return 0;
}

int cmd_spectra(const GlobalOpts& opts, const std::string& op_text, double kappa,
                double sigma_eta, double sigma_t, double omega_min, double omega_max,
                double omega_step) {
    spectra::SpectralConfig cfg;
    cfg.kappa = kappa;
    cfg.sigma_eta = sigma_eta;
    cfg.sigma_t = sigma_t;
    cfg.h_hat = spectra::parse_operator(op_text);

    if (omega_step <= 0.0) throw std::invalid_argument("spectra: omega-step must be > 0");
    std::vector<double> grid;
    for (double w = omega_min; w <= omega_max + 1e-12; w += omega_step) grid.push_back(w);

    emit(opts, spectra::rows_to_csv(spectra::tabulate(grid, cfg)));
    return 0;
}

int cmd_loss_eval(const GlobalOpts& opts, const std::string& restored_path,
                  const std::string& reference_path) {
    const CliConfig cfg = effective_config(opts);
    const ImageBuffer x_hat = read_png(restored_path);
    const ImageBuffer x = read_png(reference_path);

    const adv::FeatureExtractor extractor(cfg.seed);
    const adv::CriticHead head = extractor.make_head(cfg.seed);
    const adv::CriticFeatures f_hat = extractor.features(x_hat);
    const adv::CriticFeatures f_ref = extractor.features(x);
    const adv::CriticScore d_fake = adv::critic_score(f_hat, head);
    const adv::CriticScore d_real = adv::critic_score(f_ref, head);

    const adv::GeneratorLoss gen = adv::generator_loss(
        x_hat, x, extractor.embedding(x_hat), extractor.embedding(x), d_fake.aggregate, cfg.loss);

    json out;
    out["mse_term"] = gen.mse_term;
    out["perceptual_term"] = gen.perceptual_term;
    out["adv_term"] = gen.adv_term;
    out["generator_total"] = gen.total;
    out["d_fake"] = d_fake.aggregate;
    out["d_real"] = d_real.aggregate;
    out["discriminator_loss"] = adv::discriminator_loss(d_real.aggregate, d_fake.aggregate);
    out["weights"] = {{"alpha", cfg.loss.alpha},
                      {"beta", cfg.loss.beta},
                      {"lambda", cfg.loss.lambda},
                      {"gamma", cfg.loss.gamma}};
    emit(opts, out.dump() + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-aware degradation analysis and routing toolkit"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "key=value config file");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "seed override");
    app.add_flag("--verbose", opts.verbose, "verbose output");
    app.add_option("--out", opts.out_path, "write output to file instead of stdout");
    app.add_option("--threads", opts.threads, "worker threads for synth/eval");

    auto* analyze = app.add_subcommand("analyze", "analyze a PNG into a restoration plan");
    std::string image_path;
    analyze->add_option("image", image_path, "input PNG")->required();

    auto* synth = app.add_subcommand("synth", "write a labeled synthetic corpus");
    int n_per_class = 10;
    std::string out_dir;
    synth->add_option("--n", n_per_class, "images per class");
    synth->add_option("--dir", out_dir, "output directory")->required();

    auto* eval = app.add_subcommand("eval", "evaluate planner accuracy on a manifest");
    std::string manifest_path;
    eval->add_option("manifest", manifest_path, "manifest.jsonl path")->required();

    auto* route = app.add_subcommand("route-demo", "run the routing math on a token spec");
    std::string route_spec, tensor_in, tensor_out;
    route->add_option("--spec", route_spec, "JSON token-sequence spec");
    route->add_option("--tensor", tensor_in, "load the sequence from a tensor file");
    route->add_option("--dump-tensor", tensor_out, "save the sequence to a tensor file");

    auto* spectra_cmd = app.add_subcommand("spectra", "tabulate spectral weights as CSV");
    std::string op_text = "identity";
    double kappa = 2.0, sigma_eta = 0.1, sigma_t = 1.0;
    double omega_min = 0.05, omega_max = 8.0, omega_step = 0.05;
    spectra_cmd->add_option("--op", op_text, "operator: identity | gaussian_blur:S | ideal_lowpass:C | mask_band:LO:HI");
    spectra_cmd->add_option("--kappa", kappa, "prior spectrum decay exponent");
    spectra_cmd->add_option("--sigma-eta", sigma_eta, "measurement noise");
    spectra_cmd->add_option("--sigma-t", sigma_t, "smoothing scale");
    spectra_cmd->add_option("--omega-min", omega_min, "grid start");
    spectra_cmd->add_option("--omega-max", omega_max, "grid end");
    spectra_cmd->add_option("--omega-step", omega_step, "grid step");

    auto* loss_eval = app.add_subcommand("loss-eval", "loss component breakdown for two PNGs");
    std::string restored_path, reference_path;
    loss_eval->add_option("restored", restored_path, "restored PNG")->required();
    loss_eval->add_option("reference", reference_path, "reference PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*seed_opt) opts.seed = seed_flag;

    try {
        if (*analyze) return cmd_analyze(opts, image_path);
        if (*synth) return cmd_synth(opts, n_per_class, out_dir);
        if (*eval) return cmd_eval(opts, manifest_path);
        if (*route) return cmd_route_demo(opts, route_spec, tensor_in, tensor_out);
        if (*spectra_cmd) {
            return cmd_spectra(opts, op_text, kappa, sigma_eta, sigma_t, omega_min, omega_max,
                               omega_step);
        }
        if (*loss_eval) return cmd_loss_eval(opts, restored_path, reference_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
