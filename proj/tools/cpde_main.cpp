// Command-line front end: noise injection, denoising runs, metric evaluation,
// and manifest-driven benchmark sweeps over the coupled-PDE library.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpde/cpde.hpp"
#include "cpde/errors.hpp"
#include "cpde/pgm.hpp"
#include "cpde/quality.hpp"

namespace {

// Exit codes, fixed across commands.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kData = 4;
constexpr int kSolver = 5;
constexpr int kMaxSteps = 6;
constexpr int kRowFailures = 7;

// Shortest round-trip decimal form, for deterministic reports.
std::string fmt(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

struct DenoiseFlags {
    std::string input;
    std::string output;
    std::string history;
    cpde::CpdeParams params;
    double sigma = -1.0;   // noise-level hint used to derive lambda
    double lambda = -1.0;  // explicit fidelity weight
    bool lambda_set = false;
    bool sigma_set = false;
};

void write_history_csv(const std::string& path, const cpde::CpdeParams& params,
                       const cpde::RunHistory& history) {
    std::ofstream out(path);
    if (!out) throw cpde::IoError("cannot open " + path + " for writing");
    out << "# tau=" << fmt(params.tau) << " xi=" << fmt(params.xi) << " phi=" << fmt(params.phi)
        << " psi=" << fmt(params.psi) << " lambda=" << fmt(params.lambda)
        << " k=" << fmt(params.k) << " eps=" << fmt(params.eps)
        << " h_cap=" << fmt(params.h_cap) << " max_steps=" << params.max_steps
        << " solver_tol=" << fmt(params.solver.tol) << "\n";
    out << "step,rel_change,iters_u,iters_v,iters_I,min_I,max_I\n";
    for (const auto& rec : history.records) {
        out << rec.step << ',' << fmt(rec.rel_change) << ',' << rec.iters_u << ',' << rec.iters_v
            << ',' << rec.iters_I << ',' << fmt(rec.min_I) << ',' << fmt(rec.max_I) << "\n";
    }
    if (!out) throw cpde::IoError("write failed for " + path);
}

int run_add_noise(const std::string& input, const std::string& output, double sigma,
                  std::uint64_t seed) {
    const cpde::ImageField clean = cpde::load_pgm(input);
    const cpde::ImageField noisy = cpde::add_gaussian_noise(clean, {sigma, seed});
    cpde::save_pgm(output, noisy);
    nlohmann::json meta;
    meta["input"] = input;
    meta["output"] = output;
    meta["sigma"] = sigma;
    meta["seed"] = seed;
    const std::string meta_path = output + ".json";
    std::ofstream meta_out(meta_path);
    if (!meta_out) throw cpde::IoError("cannot open " + meta_path + " for writing");
    meta_out << meta.dump(2) << "\n";
    if (!meta_out) throw cpde::IoError("write failed for " + meta_path);
    return kOk;
}

int run_denoise(DenoiseFlags& flags) {
    if (flags.lambda_set) {
        flags.params.lambda = flags.lambda;
    } else if (flags.sigma_set) {
        flags.params.lambda = cpde::lambda_for_sigma(flags.sigma);
    } else {
        std::cerr << "denoise: provide --lambda, or --sigma to derive it\n";
        return kUsage;
    }
    flags.params.validate();
    const cpde::ImageField noisy = cpde::load_pgm(flags.input);
    const cpde::DenoiseResult result = cpde::denoise(noisy, flags.params);
    cpde::save_pgm(flags.output, result.image);
    const std::string history_path =
        flags.history.empty() ? flags.output + ".history.csv" : flags.history;
    write_history_csv(history_path, flags.params, result.history);
    if (result.history.reason == cpde::StopReason::MaxSteps) {
        std::cerr << "denoise: max_steps=" << flags.params.max_steps
                  << " reached without meeting eps=" << fmt(flags.params.eps) << "\n";
        return kMaxSteps;
    }
    return kOk;
}

int run_evaluate(const std::string& clean_path, const std::string& noisy_path,
                 const std::string& denoised_path, const std::string& format,
                 std::optional<double> psnr_range) {
    const cpde::ImageField clean = cpde::load_pgm(clean_path);
    const cpde::ImageField noisy = cpde::load_pgm(noisy_path);
    const cpde::ImageField denoised = cpde::load_pgm(denoised_path);
    const cpde::MetricsReport rep = cpde::evaluate_metrics(clean, noisy, denoised, psnr_range);
    if (format == "json") {
        nlohmann::json obj;
        const auto put = [&obj](const char* key, double v) {
            if (std::isfinite(v))
                obj[key] = v;
            else
                obj[key] = cpde::metric_to_string(v);  // "inf"/"-inf" as strings
        };
        put("psnr", rep.psnr);
        put("psnr_grad", rep.psnr_grad);
        put("mssim", rep.mssim);
        put("isnr", rep.isnr);
        std::cout << obj.dump(2) << "\n";
    } else {
        std::cout << "psnr,psnr_grad,mssim,isnr\n"
                  << fmt(rep.psnr) << ',' << fmt(rep.psnr_grad) << ',' << fmt(rep.mssim) << ','
                  << fmt(rep.isnr) << "\n";
    }
    return kOk;
}

struct BenchmarkRow {
    std::string image;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    cpde::CpdeParams params;
};

std::vector<BenchmarkRow> parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cpde::IoError("cannot open manifest " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw cpde::ParameterError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
        throw cpde::ParameterError("manifest must be an object with a \"rows\" array");
    std::vector<BenchmarkRow> rows;
    for (const auto& jrow : doc["rows"]) {
        BenchmarkRow row;
        if (!jrow.is_object() || !jrow.contains("image"))
            throw cpde::ParameterError("manifest row needs an \"image\" path");
        row.image = jrow["image"].get<std::string>();
        row.sigma = jrow.value("sigma", 0.0);
        if (row.sigma < 0.0) throw cpde::ParameterError("manifest row sigma must be >= 0");
        row.seed = jrow.value("seed", std::uint64_t{0});
        const nlohmann::json jp = jrow.value("params", nlohmann::json::object());
        row.params.tau = jp.value("tau", row.params.tau);
        row.params.xi = jp.value("xi", row.params.xi);
        row.params.phi = jp.value("phi", row.params.phi);
        row.params.psi = jp.value("psi", row.params.psi);
        row.params.k = jp.value("k", row.params.k);
        row.params.eps = jp.value("eps", row.params.eps);
        row.params.h_cap = jp.value("h_cap", row.params.h_cap);
        row.params.max_steps = jp.value("max_steps", row.params.max_steps);
        row.params.solver.tol = jp.value("solver_tol", row.params.solver.tol);
        if (jp.contains("lambda"))
            row.params.lambda = jp["lambda"].get<double>();
        else if (row.sigma > 0.0)
            row.params.lambda = cpde::lambda_for_sigma(row.sigma);
        else
            throw cpde::ParameterError("manifest row for " + row.image +
                                       " needs \"lambda\" (sigma is 0)");
        row.params.validate();  // reject the whole manifest before any compute
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_benchmark(const std::string& manifest_path, const std::string& output_path) {
    const std::vector<BenchmarkRow> rows = parse_manifest(manifest_path);
    std::ostringstream csv;
    csv << "image,sigma,seed,steps,mssim,psnr,psnr_grad,isnr\n";
    int failures = 0;
    for (const BenchmarkRow& row : rows) {
        try {
            const cpde::ImageField clean = cpde::load_pgm(row.image);
            const cpde::ImageField noisy = cpde::add_gaussian_noise(clean, {row.sigma, row.seed});
            const cpde::DenoiseResult result = cpde::denoise(noisy, row.params);
            const cpde::MetricsReport rep =
                cpde::evaluate_metrics(clean, noisy, result.image);
            csv << row.image << ',' << fmt(row.sigma) << ',' << row.seed << ','
                << result.history.records.size() << ',' << fmt(rep.mssim) << ',' << fmt(rep.psnr)
                << ',' << fmt(rep.psnr_grad) << ',' << fmt(rep.isnr) << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << "benchmark: row " << row.image << " failed: " << e.what() << "\n";
            csv << row.image << ',' << fmt(row.sigma) << ',' << row.seed
                << ",-1,nan,nan,nan,nan\n";
        }
    }
    if (output_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(output_path);
        if (!out) throw cpde::IoError("cannot open " + output_path + " for writing");
        out << csv.str();
        if (!out) throw cpde::IoError("write failed for " + output_path);
    }
    return failures == 0 ? kOk : kRowFailures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-PDE image denoiser"};
    app.require_subcommand(1);

    // add-noise
    auto* noise_cmd = app.add_subcommand("add-noise", "Add seeded Gaussian noise to a PGM image");
    std::string noise_input, noise_output;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
    noise_cmd->add_option("input", noise_input, "Input PGM (P5)")->required();
    noise_cmd->add_option("output", noise_output, "Output PGM (P5)")->required();
    noise_cmd->add_option("--sigma", noise_sigma, "Noise standard deviation")
        ->required()
        ->check(CLI::NonNegativeNumber);
    noise_cmd->add_option("--seed", noise_seed, "Generator seed (default 0)");

    // denoise
    auto* den_cmd = app.add_subcommand("denoise", "Run the coupled-PDE denoiser");
    DenoiseFlags den;
    den_cmd->add_option("input", den.input, "Noisy input PGM (P5)")->required();
    den_cmd->add_option("output", den.output, "Denoised output PGM (P5)")->required();
    den_cmd->add_option("--history", den.history,
                        "History CSV path (default: <output>.history.csv)");
    den_cmd->add_option("--tau", den.params.tau, "Time step")->check(CLI::PositiveNumber);
    den_cmd->add_option("--xi", den.params.xi, "Gaussian smoothing std")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--phi", den.params.phi, "Edge relaxation rate")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--psi", den.params.psi, "Edge smoothing strength")
        ->check(CLI::NonNegativeNumber);
    den_cmd->add_option("--lambda", den.lambda, "Fidelity weight")
        ->check(CLI::NonNegativeNumber);
    den_cmd->add_option("--sigma", den.sigma, "Noise std, used to derive lambda = 1275/sigma^2")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--k", den.params.k, "Diffusivity threshold (required)")
        ->required()
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--eps", den.params.eps, "Stopping threshold")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--h-cap", den.params.h_cap, "Edge source truncation cap")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--max-steps", den.params.max_steps, "Step limit")
        ->check(CLI::PositiveNumber);
    den_cmd->add_option("--solver-tol", den.params.solver.tol, "Linear solver tolerance")
        ->check(CLI::PositiveNumber);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Metrics for a clean/noisy/denoised triple");
    std::string eval_clean, eval_noisy, eval_denoised, eval_format = "csv";
    double eval_psnr_range = 0.0;
    bool eval_range_set = false;
    eval_cmd->add_option("clean", eval_clean, "Clean reference PGM")->required();
    eval_cmd->add_option("noisy", eval_noisy, "Noisy PGM")->required();
    eval_cmd->add_option("denoised", eval_denoised, "Denoised PGM")->required();
    eval_cmd->add_option("--format", eval_format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}));
    eval_cmd
        ->add_option("--psnr-range", eval_psnr_range,
                     "Fixed dynamic range for PSNR instead of the reference's min-max range")
        ->check(CLI::PositiveNumber);

    // benchmark
    auto* bench_cmd = app.add_subcommand("benchmark", "Run a JSON manifest of denoising rows");
    std::string bench_manifest, bench_output;
    bench_cmd->add_option("manifest", bench_manifest, "Manifest JSON path")->required();
    bench_cmd->add_option("--output", bench_output, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    den.lambda_set = den_cmd->count("--lambda") > 0;
    den.sigma_set = den_cmd->count("--sigma") > 0;
    eval_range_set = eval_cmd->count("--psnr-range") > 0;

    try {
        if (noise_cmd->parsed())
            return run_add_noise(noise_input, noise_output, noise_sigma, noise_seed);
        if (den_cmd->parsed()) return run_denoise(den);
        if (eval_cmd->parsed())
            return run_evaluate(eval_clean, eval_noisy, eval_denoised, eval_format,
                                eval_range_set ? std::optional<double>(eval_psnr_range)
                                               : std::nullopt);
        if (bench_cmd->parsed()) return run_benchmark(bench_manifest, bench_output);
    } catch (const cpde::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const cpde::SolveError& e) {
        std::cerr << "error: " << e.what() << " (step " << e.step << ", " << e.system
                  << " system)\n";
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
