// Acceptance suite. One line per criterion:  C<n> PASS|FAIL|SKIP <summary>
// Run everything, or a single criterion with --criterion N. Exit code 0 when all
// requested criteria pass, 1 on any failure, 77 when every requested one was skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gdm/cli.hpp"
#include "gdm/corpus.hpp"
#include "gdm/eval.hpp"
#include "gdm/gdm.hpp"
#include "gdm/geometry.hpp"
#include "gdm/parallel.hpp"
#include "gdm/synth.hpp"
#include "oracles.hpp"

using namespace gdm;
namespace fs = std::filesystem;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
    Outcome outcome;
    std::string summary;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string join(const std::vector<double>& v, const char* f = "{:.4f}") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt::format(fmt::runtime(f), v[i]);
    return out;
}

Verdict pass_if(bool ok, std::string summary) {
    return {ok ? Outcome::kPass : Outcome::kFail, std::move(summary)};
}

LdaParams lda(std::size_t K, std::size_t V, std::size_t M, std::uint64_t N, double alpha, double eta,
              std::uint64_t seed) {
    LdaParams p;
    p.K = K, p.V = V, p.M = M, p.doc_lengths = ConstantLength{N}, p.alpha = alpha, p.eta = eta, p.seed = seed;
    return p;
}

GdmConfig k_config(std::size_t K, std::uint64_t seed) {
    GdmConfig c;
    c.K = K;
    c.seed = seed;
    return c;
}

// ---------------------------------------------------------------------------

Verdict c1() {
    std::vector<double> mm, secs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto [corpus, truth] = generate_corpus(lda(4, 5, 5000, 100, 0.1, 0.1, seed));
        const auto data = normalize(corpus);
        const auto start = Clock::now();
        const auto model = fit_gdm(data, k_config(4, seed));
        secs.push_back(seconds_since(start));
        mm.push_back(min_matching_distance(model.polytope.vertices(), truth.beta));
    }
    const double med = median(mm);
    const double slowest = *std::max_element(secs.begin(), secs.end());
    return pass_if(med < 0.05 && slowest < 5.0,
                   fmt::format("GDM V=5 K=4 M=5000 N=100: median MM {:.4f} (< 0.05), slowest fit {:.2f}s (< 5s); "
                               "per seed [{}]",
                               med, slowest, join(mm)));
}

Verdict c2() {
    const auto start = Clock::now();
    const std::vector<double> alphas = {1.0, 0.1, 0.01, 0.001};
    std::vector<double> medians;
    for (double alpha : alphas) {
        std::vector<double> mm;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto [corpus, truth] = generate_corpus(lda(3, 10, 500, 100000, alpha, 0.1, seed));
            const auto model = fit_gdm(normalize(corpus), k_config(3, seed));
            mm.push_back(min_matching_distance(model.polytope.vertices(), truth.beta));
        }
        medians.push_back(median(mm));
    }
    const double secs = seconds_since(start);
    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] <= medians[i - 1];
    return pass_if(monotone && medians.back() < 0.02 && secs < 120.0,
                   fmt::format("M=500 V=10 K=3 N=100000, alpha 1/0.1/0.01/0.001: median MM [{}] nonincreasing={}, "
                               "last < 0.02, {:.1f}s (< 120s)",
                               join(medians), monotone, secs));
}

Verdict c3() {
    const auto start = Clock::now();
    // five topics uniform on disjoint 20-word blocks: all pairwise distances equal
    Matrix beta = Matrix::Zero(5, 100);
    for (int k = 0; k < 5; ++k) beta.block(k, 20 * k, 1, 20).setConstant(0.05);
    GenerationOverrides overrides;
    overrides.beta = beta;
    std::vector<double> medians, tuned_medians;
    for (std::size_t M : {500, 2000, 8000}) {
        std::vector<double> mm, tmm;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto [corpus, truth] = generate_corpus(lda(5, 100, M, 200, 0.1, 0.1, seed), overrides);
            const auto data = normalize(corpus);
            const auto model = fit_gdm(data, k_config(5, seed));
            mm.push_back(min_matching_distance(model.polytope.vertices(), truth.beta));
            const auto tuned = tune_extensions(model, data, model.assignments);
            tmm.push_back(min_matching_distance(tuned.polytope.vertices(), truth.beta));
        }
        medians.push_back(median(mm));
        tuned_medians.push_back(median(tmm));
    }
    const double secs = seconds_since(start);
    const bool strict = medians[1] < medians[0] && medians[2] < medians[1];
    return pass_if(strict && secs < 300.0,
                   fmt::format("equilateral beta, N=200 V=100 K=5 alpha=0.1, M 500/2000/8000: GDM median MM [{}] "
                               "strictly decreasing={} (tGDM [{}]), {:.1f}s (< 300s)",
                               join(medians, "{:.5f}"), strict, join(tuned_medians, "{:.5f}"), secs));
}

// Noise-free documents inside a fixed polytope plus one far document.
std::pair<NormalizedCorpus, Matrix> outlier_instance() {
    Matrix beta(3, 4);
    beta << 0.8, 0, 0, 0.2, 0.25, 0.425, 0, 0.325, 0, 0.185, 0.36, 0.455;
    Rng rng(19);
    Matrix X(201, 4);
    for (int m = 0; m < 200; ++m) X.row(m) = sample_dirichlet(3, 0.3, rng).transpose() * beta;
    X.row(200) << 0.005, 0.61, 0.1, 0.285;
    return {NormalizedCorpus::from_dense(X, std::vector<double>(201, 100.0)), beta};
}

Verdict c4() {
    std::size_t dominated = 0;
    double worst = -1e300;
    for (std::uint64_t seed = 1001; seed <= 1020; ++seed) {
        Rng shape(seed);
        const std::size_t K = 2 + shape.uniform_index(5), V = 10 + shape.uniform_index(41);
        const std::size_t M = 200 + shape.uniform_index(801);
        const std::uint64_t N = 50 + shape.uniform_index(451);
        auto [corpus, truth] = generate_corpus(lda(K, V, M, N, 0.1 + 0.9 * shape.uniform(), 0.1, seed));
        const auto data = normalize(corpus);
        const auto plain = fit_gdm(data, k_config(K, seed));
        const auto tuned = tune_extensions(plain, data, plain.assignments);
        const double diff = tuned.geometric_objective() - plain.geometric_objective();
        worst = std::max(worst, diff);
        dominated += diff <= 1e-9;
    }
    auto [data, beta] = outlier_instance();
    const auto plain = fit_gdm(data, k_config(3, 0));
    const auto tuned = tune_extensions(plain, data, plain.assignments);
    const double mm_plain = min_matching_distance(plain.polytope.vertices(), beta);
    const double mm_tuned = min_matching_distance(tuned.polytope.vertices(), beta);
    return pass_if(dominated == 20 && mm_tuned < mm_plain,
                   fmt::format("G(tGDM) <= G(GDM) + 1e-9 on {}/20 instances (max diff {:.3e}); outlier instance MM "
                               "GDM {:.4f} vs tGDM {:.4f}",
                               dominated, worst, mm_plain, mm_tuned));
}

Verdict c5() {
    const auto start = Clock::now();
    double worst_upper = 1e300, worst_lower = 1e300;
    std::size_t held = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        Rng shape(seed, 5);
        LdaParams p;
        p.K = 2 + shape.uniform_index(4);
        p.V = 5 + shape.uniform_index(26);
        p.M = 5 + shape.uniform_index(26);
        p.doc_lengths = LengthRange{20, 300};
        p.alpha = 0.1 + 0.9 * shape.uniform();
        p.eta = 0.1 + 0.9 * shape.uniform();
        p.seed = seed;
        auto [corpus, truth] = generate_corpus(p);
        const auto r = check_likelihood_bounds(truth.theta, truth.beta, corpus);
        worst_upper = std::min(worst_upper, r.upper_slack);
        worst_lower = std::min(worst_lower, r.lower_slack);
        held += r.holds(1e-9);
    }
    const double secs = seconds_since(start);
    return pass_if(held == 1000 && secs < 30.0,
                   fmt::format("both bounds hold on {}/1000 instances; min upper slack {:.3e}, min lower slack "
                               "{:.3e}; {:.1f}s (< 30s)",
                               held, worst_upper, worst_lower, secs));
}

Verdict c6() {
    const auto start = Clock::now();
    std::vector<double> angles;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(seed, 6);
        const std::size_t M = 4 + rng.uniform_index(5), V = 3 + rng.uniform_index(3);
        Matrix X(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(V));
        std::vector<double> w(M);
        for (std::size_t m = 0; m < M; ++m) {
            X.row(static_cast<Eigen::Index>(m)) = sample_dirichlet(V, 1.0, rng).transpose();
            w[m] = static_cast<double>(1 + rng.uniform_index(100));
        }
        angles.push_back(spectral_span_check(NormalizedCorpus::from_dense(X, w), 2));
    }
    const double secs = seconds_since(start);
    const double worst = *std::max_element(angles.begin(), angles.end());
    const auto below = std::count_if(angles.begin(), angles.end(), [](double a) { return a < 1e-8; });
    return pass_if(worst < 1e-8 && secs < 60.0,
                   fmt::format("max principal angle over 50 instances {:.3e} rad (< 1e-8); {}/50 below tolerance, "
                               "median {:.3e}; {:.1f}s",
                               worst, below, median(angles), secs));
}

Verdict c7() {
    double worst_gap = 0.0, worst_point = 0.0;
    std::size_t ok = 0;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        Rng rng(seed, 7);
        const std::size_t K = 1 + rng.uniform_index(4), V = 2 + rng.uniform_index(5);
        Matrix B(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
        for (std::size_t k = 0; k < K; ++k) B.row(static_cast<Eigen::Index>(k)) = sample_dirichlet(V, 0.5, rng).transpose();
        Vector q = sample_dirichlet(V, 1.0, rng);
        // some queries off the simplex
        if (seed % 3 == 0)
            for (Eigen::Index i = 0; i < q.size(); ++i) q[i] += 0.2 * rng.normal();
        const auto r = project_point(q, B);
        const auto g = oracle::grid_project(B, q);
        const double gap = std::max(0.0, r.optimality_gap);
        const double dpoint = (r.point - g.point).cwiseAbs().maxCoeff();
        worst_gap = std::max(worst_gap, gap);
        worst_point = std::max(worst_point, dpoint);
        ok += gap < 1e-8 && dpoint <= 2e-3;
    }
    return pass_if(ok == 500, fmt::format("{}/500 projections certified (max gap {:.3e} < 1e-8) and within 2e-3 of "
                                          "the grid oracle (max {:.3e})",
                                          ok, worst_gap, worst_point));
}

std::size_t ngdm_topics(const NormalizedCorpus& data, double lambda, std::uint64_t seed) {
    GdmConfig c;
    c.lambda = lambda;
    c.seed = seed;
    return fit_ngdm(data, c).num_topics();
}

Verdict c8() {
    auto dataset = [](std::uint64_t seed) {
        return normalize(generate_corpus(lda(15, 300, 1000, 500, 0.1, 0.1, seed)).first);
    };
    // calibration on seeds disjoint from the evaluation seeds
    std::vector<NormalizedCorpus> calibration;
    for (std::uint64_t seed = 101; seed <= 105; ++seed) calibration.push_back(dataset(seed));
    double best_lambda = 0.0;
    int best_hits = -1;
    double best_spread = 1e300;
    std::string sweep;
    for (int step = 0; step <= 12; ++step) {
        const double lambda = 8.0 + 0.5 * step;
        std::vector<double> counts;
        int hits = 0;
        for (std::size_t i = 0; i < calibration.size(); ++i) {
            const auto k = ngdm_topics(calibration[i], lambda, 101 + i);
            counts.push_back(static_cast<double>(k));
            hits += k == 15;
        }
        const double spread = std::abs(median(counts) - 15.0);
        sweep += fmt::format(" {}:{}", lambda, hits);
        if (hits > best_hits || (hits == best_hits && spread < best_spread))
            best_lambda = lambda, best_hits = hits, best_spread = spread;
    }
    std::vector<double> found;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto k = ngdm_topics(dataset(seed), best_lambda, seed);
        found.push_back(static_cast<double>(k));
        hits += k == 15;
    }
    return pass_if(hits >= 3, fmt::format("lambda={} from calibration sweep (lambda:hits{}); K' on seeds 1-5 [{}], "
                                          "{}/5 equal 15 (need >= 3)",
                                          best_lambda, sweep, join(found, "{:.0f}"), hits));
}

Verdict c9() {
    const char* dir = std::getenv("GDM_NIPS_DIR");
    if (!dir || !*dir) return {Outcome::kSkip, "set GDM_NIPS_DIR to a directory with docword.txt to run"};
    const fs::path root(dir);
    const fs::path vocab = root / "vocab.txt";
    const Corpus corpus = load_uci_bag_of_words_file((root / "docword.txt").string(),
                                                     fs::exists(vocab) ? vocab.string() : std::string());
    const std::size_t heldout_docs = corpus.num_docs() / 10;
    auto [train, test] = split_holdout(corpus, heldout_docs, 0);
    const auto data = normalize(train);
    std::vector<double> perp;
    double secs_k10 = 0.0;
    for (std::size_t K : {5, 10, 15, 20}) {
        GdmConfig c = k_config(K, 0);
        c.restarts = 5;
        const auto start = Clock::now();
        const auto model = fit_gdm(data, c);
        if (K == 10) secs_k10 = seconds_since(start);
        perp.push_back(perplexity(model.polytope, infer_theta(model.polytope, test), test).perplexity);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < perp.size(); ++i) monotone = monotone && perp[i] < perp[i - 1];
    const bool close = std::abs(perp[1] - 1061.0) <= 0.15 * 1061.0;
    return pass_if(monotone && close && secs_k10 <= 60.0,
                   fmt::format("held-out perplexity K=5/10/15/20 [{}] decreasing={}, K=10 within 15% of 1061={}, "
                               "K=10 fit {:.1f}s (<= 60s)",
                               join(perp, "{:.1f}"), monotone, close, secs_k10));
}

Verdict c10() {
    const fs::path dir = fs::temp_directory_path() / fmt::format("gdm_acceptance_{}", std::random_device{}());
    fs::create_directories(dir);
    auto path = [&](const std::string& name) { return (dir / name).string(); };
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    std::ostringstream sink;
    auto cli = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };

    struct Step {
        std::vector<std::string> args;
        std::string manifest;
        std::vector<std::string> outputs;
    };
    const std::vector<Step> steps = {
        {{"simulate", "--K", "4", "--V", "60", "--M", "1500", "--Nm", "50:300", "--alpha", "0.1", "--eta", "0.1",
          "--seed", "3", "--out", path("d"), "--threads", "1"},
         path("d/manifest.json"),
         {path("d/docword.txt"), path("d/vocab.txt"), path("d/truth.json")}},
        {{"fit", "--algo", "gdm", "--K", "4", "--in", path("d"), "--out", path("gdm.json"), "--threads", "1"},
         path("gdm.json.manifest.json"),
         {path("gdm.json")}},
        {{"fit", "--algo", "tgdm", "--K", "4", "--in", path("d"), "--out", path("tgdm.json"), "--seed", "5",
          "--threads", "1"},
         path("tgdm.json.manifest.json"),
         {path("tgdm.json")}},
        {{"fit", "--algo", "ngdm", "--lambda", "2", "--in", path("d"), "--out", path("ngdm.json"), "--threads", "1"},
         path("ngdm.json.manifest.json"),
         {path("ngdm.json")}},
    };
    std::size_t identical = 0, total = 0;
    std::string detail;
    for (const auto& step : steps) {
        if (cli(step.args) != kExitOk) {
            fs::remove_all(dir);
            return {Outcome::kFail, "command failed: " + step.args[0] + "\n" + sink.str()};
        }
    }
    for (const auto& step : steps) {
        std::map<std::string, std::string> before;
        for (const auto& o : step.outputs) before[o] = slurp(o), fs::remove(o);
        for (const char* threads : {"4", "2"}) {
            const int code = cli({"replay", "--from", step.manifest, "--threads", threads, "--manifest",
                                  path("replay.manifest.json")});
            for (const auto& o : step.outputs) {
                ++total;
                const bool same = code == kExitOk && fs::exists(o) && slurp(o) == before[o];
                identical += same;
                if (!same) detail += " " + fs::path(o).filename().string() + "@" + threads;
            }
        }
    }
    fs::remove_all(dir);
    return pass_if(identical == total,
                   fmt::format("simulate + gdm/tgdm/ngdm fits at --threads 1, replayed from manifests at --threads "
                               "4 and 2: {}/{} outputs byte-identical{}",
                               identical, total, detail.empty() ? "" : "; differing:" + detail));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    std::size_t threads = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);
    spdlog::set_level(spdlog::level::warn);

    const std::vector<std::function<Verdict()>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
    int failed = 0, skipped = 0, ran = 0;
    for (int i = 1; i <= 10; ++i) {
        if (only && i != only) continue;
        ++ran;
        const auto start = Clock::now();
        Verdict v;
        try {
            v = criteria[static_cast<std::size_t>(i - 1)]();
        } catch (const std::exception& e) {
            v = {Outcome::kFail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL" : "SKIP";
        std::printf("C%d %s %s [%.1fs]\n", i, tag, v.summary.c_str(), seconds_since(start));
        std::fflush(stdout);
        failed += v.outcome == Outcome::kFail;
        skipped += v.outcome == Outcome::kSkip;
    }
    if (failed) return 1;
    return skipped == ran ? 77 : 0;
}
