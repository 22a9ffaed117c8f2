#include "gdm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "gdm/corpus.hpp"
#include "gdm/error.hpp"
#include "gdm/eval.hpp"
#include "gdm/gdm.hpp"
#include "gdm/parallel.hpp"
#include "gdm/serialize.hpp"
#include "gdm/synth.hpp"

namespace fs = std::filesystem;

namespace gdm {
namespace {

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// What a command did, for its manifest.
struct RunRecord {
    std::string command;
    Json parameters = Json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    // where the manifest goes when --manifest is absent; empty means the error stream
    std::string default_manifest;
};

struct Common {
    std::size_t threads = 0;
    std::string manifest;
    std::string log_level = "warn";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--threads", c.threads, "Worker thread cap (0 = all cores); does not change results");
    cmd->add_option("--manifest", c.manifest, "Where to write the run manifest");
    cmd->add_option("--log-level", c.log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
}

struct CorpusFiles {
    std::string docword;
    std::optional<std::string> vocab;
};

// A directory holds docword.txt (+ vocab.txt), or the UCI archive names docword.<name>.txt
// and vocab.<name>.txt. A plain file is taken as the docword file.
CorpusFiles resolve_corpus(const std::string& path) {
    if (!fs::exists(path)) throw std::runtime_error("no such corpus: " + path);
    if (!fs::is_directory(path)) return {path, std::nullopt};
    const fs::path dir(path);
    if (fs::exists(dir / "docword.txt")) {
        CorpusFiles files{(dir / "docword.txt").string(), std::nullopt};
        if (fs::exists(dir / "vocab.txt")) files.vocab = (dir / "vocab.txt").string();
        return files;
    }
    std::vector<fs::path> candidates;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("docword.", 0) == 0 && name.size() > 12 && name.substr(name.size() - 4) == ".txt")
            candidates.push_back(entry.path());
    }
    if (candidates.size() != 1)
        throw std::runtime_error(path + ": expected docword.txt or exactly one docword.<name>.txt");
    const std::string name = candidates[0].filename().string();
    const std::string stem = name.substr(8, name.size() - 12);
    CorpusFiles files{candidates[0].string(), std::nullopt};
    if (fs::exists(dir / ("vocab." + stem + ".txt"))) files.vocab = (dir / ("vocab." + stem + ".txt")).string();
    return files;
}

Corpus load_corpus(const std::string& path, RunRecord& rec) {
    CorpusFiles files = resolve_corpus(path);
    rec.inputs.push_back(files.docword);
    if (files.vocab) rec.inputs.push_back(*files.vocab);
    return load_uci_bag_of_words_file(files.docword, files.vocab);
}

DocLengthSpec parse_lengths(const std::string& text) {
    auto parse_u64 = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
            throw UsageError("--Nm expects a positive integer or min:max, got '" + text + "'");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) return ConstantLength{parse_u64(text)};
    LengthRange r{parse_u64(std::string_view(text).substr(0, colon)),
                  parse_u64(std::string_view(text).substr(colon + 1))};
    if (r.max < r.min) throw UsageError("--Nm range must satisfy min <= max");
    return r;
}

void write_text(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    fn(out);
    if (!out) throw std::runtime_error("write failed for " + path);
}

// ---- simulate ----

struct SimulateOptions {
    std::size_t K = 0, V = 0, M = 0;
    std::string Nm;
    double alpha = 0.0, eta = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

void add_simulate_flags(CLI::App* cmd, SimulateOptions& o, bool required) {
    auto req = [&](CLI::Option* opt) { return required ? opt->required() : opt; };
    req(cmd->add_option("--K", o.K, "Number of topics"));
    req(cmd->add_option("--V", o.V, "Vocabulary size"));
    req(cmd->add_option("--M", o.M, "Number of documents"));
    req(cmd->add_option("--Nm", o.Nm, "Document length: N or min:max"));
    req(cmd->add_option("--alpha", o.alpha, "Dirichlet concentration of theta"));
    req(cmd->add_option("--eta", o.eta, "Dirichlet concentration of beta"));
}

LdaParams to_params(const SimulateOptions& o) {
    LdaParams p;
    p.K = o.K;
    p.V = o.V;
    p.M = o.M;
    p.doc_lengths = parse_lengths(o.Nm);
    p.alpha = o.alpha;
    p.eta = o.eta;
    p.seed = o.seed;
    try {
        p.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }
    return p;
}

void run_simulate(const SimulateOptions& o, std::ostream& out, RunRecord& rec) {
    const LdaParams params = to_params(o);
    rec.parameters = params_to_json(params);
    rec.seed = o.seed;
    auto [corpus, truth] = generate_corpus(params);
    fs::create_directories(o.out);
    const fs::path dir(o.out);
    const std::string docword = (dir / "docword.txt").string();
    const std::string vocab = (dir / "vocab.txt").string();
    const std::string truth_path = (dir / "truth.json").string();
    write_text(docword, [&](std::ostream& s) { write_uci_bag_of_words(corpus, s); });
    write_text(vocab, [&](std::ostream& s) { write_vocab(corpus, s); });
    write_json_file(truth_path, truth_to_json(truth));
    rec.outputs = {docword, vocab, truth_path};
    rec.default_manifest = (dir / "manifest.json").string();
    out << "wrote " << corpus.num_docs() << " documents (" << corpus.total_tokens() << " tokens) to " << o.out
        << '\n';
}

// ---- fit ----

struct FitOptions {
    std::string algo;
    std::optional<std::size_t> K;
    std::optional<double> lambda;
    std::size_t restarts = 10;
    std::size_t max_iters = 1500;
    std::string in;
    std::string out;
    std::uint64_t seed = 0;
    bool unweighted_center = false;
    std::string dp_rule = "weighted";
};

void add_fit_flags(CLI::App* cmd, FitOptions& o) {
    cmd->add_option("--algo", o.algo, "gdm|tgdm|ngdm")->required()->check(CLI::IsMember({"gdm", "tgdm", "ngdm"}));
    cmd->add_option("--lambda", o.lambda, "DP-means penalty (ngdm)");
    cmd->add_option("--restarts", o.restarts, "k-means restarts")->capture_default_str();
    cmd->add_option("--max-iters", o.max_iters, "Clustering iteration cap")->capture_default_str();
    cmd->add_flag("--unweighted-center", o.unweighted_center, "Use the plain mean of the documents as center");
    cmd->add_option("--dp-rule", o.dp_rule, "DP-means opening test: weighted|unweighted")
        ->check(CLI::IsMember({"weighted", "unweighted"}));
}

GdmConfig to_config(const FitOptions& o) {
    GdmConfig c;
    if (o.algo == "ngdm") {
        if (o.K) throw UsageError("--algo ngdm takes --lambda, not --K");
        if (!o.lambda) throw UsageError("--algo ngdm requires --lambda");
        if (!(*o.lambda > 0.0)) throw UsageError("--lambda must be positive");
        c.lambda = o.lambda;
    } else {
        if (o.lambda) throw UsageError("--algo " + o.algo + " takes --K, not --lambda");
        if (!o.K) throw UsageError("--algo " + o.algo + " requires --K");
        if (*o.K < 1) throw UsageError("--K must be at least 1");
        c.K = o.K;
    }
    if (o.restarts < 1) throw UsageError("--restarts must be at least 1");
    if (o.max_iters < 1) throw UsageError("--max-iters must be at least 1");
    c.restarts = o.restarts;
    c.max_iters = o.max_iters;
    c.weighted_center = !o.unweighted_center;
    c.tune = o.algo == "tgdm";
    c.seed = o.seed;
    c.dp_rule = o.dp_rule == "unweighted" ? DpOpeningRule::kUnweighted : DpOpeningRule::kWeighted;
    return c;
}

void run_fit(const FitOptions& o, std::ostream& out, RunRecord& rec) {
    const GdmConfig config = to_config(o);
    rec.parameters = config_to_json(config);
    rec.parameters["algo"] = o.algo;
    rec.seed = o.seed;
    const Corpus corpus = load_corpus(o.in, rec);
    const auto start = std::chrono::steady_clock::now();
    const GdmModel model = fit(normalize(corpus), config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json_file(o.out, model_to_json(model));
    rec.outputs = {o.out};
    rec.default_manifest = o.out + ".manifest.json";
    out << "topics " << model.num_topics() << '\n'
        << "objective " << fmt_double(model.objective) << '\n'
        << "seconds " << seconds << '\n';
}

// ---- eval ----

struct EvalOptions {
    std::string model;
    std::string heldout;
    std::string truth;
    std::string out;
    std::string perplexity_mode = "corpus";
    std::string matching = "bottleneck";
};

void run_eval(const EvalOptions& o, std::ostream& out, RunRecord& rec) {
    rec.parameters = {{"perplexity_mode", o.perplexity_mode}, {"matching", o.matching}};
    rec.inputs.push_back(o.model);
    const GdmModel model = model_from_json(read_json_file(o.model));
    const Corpus heldout = load_corpus(o.heldout, rec);
    if (heldout.vocab_size() != model.polytope.vocab_size())
        throw ValidationError("model has V=" + std::to_string(model.polytope.vocab_size()) +
                              " but the held-out corpus has V=" + std::to_string(heldout.vocab_size()));
    const Matrix theta = infer_theta(model.polytope, heldout);
    const auto mode = o.perplexity_mode == "per-doc" ? PerplexityMode::kPerDocumentMean : PerplexityMode::kCorpus;
    const PerplexityReport report = perplexity(model.polytope, theta, heldout, mode);

    Json j;
    j["perplexity"] = report.perplexity;
    if (!o.truth.empty()) {
        rec.inputs.push_back(o.truth);
        const GroundTruth truth = truth_from_json(read_json_file(o.truth));
        if (truth.beta.cols() != model.polytope.vertices().cols())
            throw ValidationError("truth and model vocabularies differ");
        j["mm_distance"] = min_matching_distance(
            model.polytope.vertices(), truth.beta,
            o.matching == "hungarian" ? MatchingMode::kHungarianMean : MatchingMode::kBottleneck);
    }
    j["floored_entries"] = report.floored_entries;
    j["total_log_likelihood"] = report.total_log_likelihood;
    j["total_tokens"] = report.total_tokens;
    j["num_topics"] = model.num_topics();
    if (o.out.empty()) {
        out << j.dump(2) << '\n';
    } else {
        write_json_file(o.out, j);
        rec.outputs = {o.out};
        rec.default_manifest = o.out + ".manifest.json";
    }
}

// ---- topics ----

struct TopicsOptions {
    std::string model;
    std::string vocab;
    std::size_t top = 10;
};

void run_topics(const TopicsOptions& o, std::ostream& out, RunRecord& rec) {
    rec.parameters = {{"top", o.top}};
    rec.inputs = {o.model, o.vocab};
    const GdmModel model = model_from_json(read_json_file(o.model));
    std::ifstream vin(o.vocab);
    if (!vin) throw std::runtime_error("cannot open " + o.vocab);
    std::vector<std::string> vocab;
    for (std::string line; std::getline(vin, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        vocab.push_back(line);
    }
    const Matrix& beta = model.polytope.vertices();
    if (vocab.size() != static_cast<std::size_t>(beta.cols()))
        throw ValidationError("vocabulary has " + std::to_string(vocab.size()) + " words but the model has V=" +
                              std::to_string(beta.cols()));
    const std::size_t n = std::min<std::size_t>(o.top, vocab.size());
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
        std::vector<std::size_t> idx(vocab.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return beta(k, static_cast<Eigen::Index>(a)) > beta(k, static_cast<Eigen::Index>(b));
        });
        out << "topic " << k << ':';
        for (std::size_t r = 0; r < n; ++r) out << ' ' << vocab[idx[r]];
        out << '\n';
    }
}

// ---- split ----

struct SplitOptions {
    std::string in;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string train;
    std::string test;
};

void run_split(const SplitOptions& o, std::ostream& out, RunRecord& rec) {
    rec.parameters = {{"n_holdout", o.n}};
    rec.seed = o.seed;
    const Corpus corpus = load_corpus(o.in, rec);
    if (o.n == 0 || o.n >= corpus.num_docs())
        throw UsageError("--n must satisfy 0 < n < " + std::to_string(corpus.num_docs()));
    auto [train, test] = split_holdout(corpus, o.n, o.seed);
    for (const auto& [dir, part] : {std::pair{o.train, &train}, std::pair{o.test, &test}}) {
        fs::create_directories(dir);
        const std::string docword = (fs::path(dir) / "docword.txt").string();
        const std::string vocab = (fs::path(dir) / "vocab.txt").string();
        write_text(docword, [&](std::ostream& s) { write_uci_bag_of_words(*part, s); });
        write_text(vocab, [&](std::ostream& s) { write_vocab(*part, s); });
        rec.outputs.push_back(docword);
        rec.outputs.push_back(vocab);
    }
    rec.default_manifest = (fs::path(o.train) / "split.manifest.json").string();
    out << "train " << train.num_docs() << " documents, heldout " << test.num_docs() << '\n';
}

// ---- sweep ----

struct SweepOptions {
    SimulateOptions sim;
    FitOptions fit;
    std::optional<std::size_t> fit_K;
    std::vector<std::string> grid;
    std::size_t holdout = 0;
    std::string out;
};

const std::vector<std::string> kSweepKeys = {"K", "V", "M", "Nm", "alpha", "eta", "seed", "lambda", "fit_K", "restarts"};

std::vector<std::pair<std::string, std::vector<std::string>>> parse_grid(const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw UsageError("--grid expects name=v1,v2,..., got '" + spec + "'");
        std::string name = spec.substr(0, eq);
        if (std::find(kSweepKeys.begin(), kSweepKeys.end(), name) == kSweepKeys.end())
            throw UsageError("--grid: unknown parameter '" + name + "'");
        for (const auto& [existing, values] : grid)
            if (existing == name) throw UsageError("--grid: parameter '" + name + "' given twice");
        std::vector<std::string> values;
        std::stringstream ss(spec.substr(eq + 1));
        for (std::string v; std::getline(ss, v, ',');) {
            if (v.empty()) throw UsageError("--grid: empty value in '" + spec + "'");
            values.push_back(v);
        }
        grid.emplace_back(std::move(name), std::move(values));
    }
    return grid;
}

template <class T>
T parse_value(const std::string& name, const std::string& text) {
    T v{};
    std::istringstream in(text);
    in >> v;
    if (!in || !in.eof()) throw UsageError("--grid: bad value '" + text + "' for " + name);
    return v;
}

void apply_setting(SweepOptions& s, const std::string& name, const std::string& value) {
    if (name == "K") s.sim.K = parse_value<std::size_t>(name, value);
    else if (name == "V") s.sim.V = parse_value<std::size_t>(name, value);
    else if (name == "M") s.sim.M = parse_value<std::size_t>(name, value);
    else if (name == "Nm") s.sim.Nm = value;
    else if (name == "alpha") s.sim.alpha = parse_value<double>(name, value);
    else if (name == "eta") s.sim.eta = parse_value<double>(name, value);
    else if (name == "seed") s.sim.seed = parse_value<std::uint64_t>(name, value);
    else if (name == "lambda") s.fit.lambda = parse_value<double>(name, value);
    else if (name == "fit_K") s.fit_K = parse_value<std::size_t>(name, value);
    else if (name == "restarts") s.fit.restarts = parse_value<std::size_t>(name, value);
}

void run_sweep(const SweepOptions& base, std::ostream& out, RunRecord& rec) {
    const auto grid = parse_grid(base.grid);
    rec.parameters = {{"algo", base.fit.algo}, {"holdout", base.holdout}, {"grid", base.grid}};
    rec.seed = base.sim.seed;

    std::ostringstream csv;
    std::vector<std::string> columns;
    for (const auto& [name, values] : grid)
        if (name != "seed") columns.push_back(name);
    for (const auto& c : columns) csv << c << ',';
    csv << "metric,value,seed\n";

    std::vector<std::size_t> index(grid.size(), 0);
    while (true) {
        SweepOptions s = base;
        std::map<std::string, std::string> setting;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            apply_setting(s, grid[g].first, grid[g].second[index[g]]);
            setting[grid[g].first] = grid[g].second[index[g]];
        }
        const LdaParams params = to_params(s.sim);
        FitOptions fo = s.fit;
        fo.seed = s.sim.seed;
        if (fo.algo != "ngdm") fo.K = s.fit_K ? s.fit_K : std::optional<std::size_t>(s.sim.K);
        const GdmConfig config = to_config(fo);

        auto [corpus, truth] = generate_corpus(params);
        Corpus train = corpus;
        std::optional<Corpus> test;
        if (base.holdout > 0) {
            if (base.holdout >= corpus.num_docs()) throw UsageError("--holdout must be smaller than M");
            auto parts = split_holdout(corpus, base.holdout, s.sim.seed);
            train = std::move(parts.first);
            test = std::move(parts.second);
        }
        const GdmModel model = fit(normalize(train), config);
        std::vector<std::pair<std::string, double>> metrics = {
            {"mm_distance", min_matching_distance(model.polytope.vertices(), truth.beta)},
            {"num_topics", static_cast<double>(model.num_topics())},
            {"objective", model.objective},
        };
        if (test) metrics.emplace_back("perplexity",
                                       perplexity(model.polytope, infer_theta(model.polytope, *test), *test).perplexity);
        for (const auto& [metric, value] : metrics) {
            for (const auto& c : columns) csv << setting[c] << ',';
            csv << metric << ',' << fmt_double(value) << ',' << s.sim.seed << '\n';
        }

        std::size_t g = grid.size();
        while (g > 0 && ++index[g - 1] == grid[g - 1].second.size()) index[--g] = 0;
        if (g == 0) break;
    }

    if (base.out.empty()) {
        out << csv.str();
    } else {
        write_text(base.out, [&](std::ostream& s) { s << csv.str(); });
        rec.outputs = {base.out};
        rec.default_manifest = base.out + ".manifest.json";
    }
}

// ---- dispatch ----

Json make_manifest(const RunRecord& rec, const std::vector<std::string>& args, std::size_t threads,
                   double seconds) {
    Json m;
    m["command"] = rec.command;
    m["argv"] = args;
    m["parameters"] = rec.parameters;
    m["seed"] = rec.seed;
    m["inputs"] = rec.inputs;
    m["outputs"] = rec.outputs;
    m["threads"] = threads;
    m["duration_seconds"] = seconds;
    m["version"] = kVersion;
    return m;
}

void emit_manifest(const Json& manifest, const std::string& path, std::ostream& err) {
    if (path.empty()) {
        err << "manifest " << manifest.dump() << '\n';
    } else {
        write_json_file(path, manifest);
    }
}

void configure_logging(const std::string& level, std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("gdm", sink);
    logger->set_pattern("%l: %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool write_manifest);

struct ReplayOptions {
    std::string manifest;
    std::optional<std::size_t> threads;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool write_manifest) {
    CLI::App app{"Geometric Dirichlet Means topic estimation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Sample an LDA corpus with known topics");
    add_simulate_flags(simulate, sim, true);
    simulate->add_option("--seed", sim.seed, "Random seed")->required();
    simulate->add_option("--out", sim.out, "Output directory")->required();
    add_common(simulate, common);

    FitOptions fo;
    auto* fitc = app.add_subcommand("fit", "Estimate topics with GDM, tGDM or nGDM");
    add_fit_flags(fitc, fo);
    fitc->add_option("--K", fo.K, "Number of topics (gdm, tgdm)");
    fitc->add_option("--in", fo.in, "Corpus directory or docword file")->required();
    fitc->add_option("--out", fo.out, "Model JSON path")->required();
    fitc->add_option("--seed", fo.seed, "Random seed")->capture_default_str();
    add_common(fitc, common);

    EvalOptions eo;
    auto* evalc = app.add_subcommand("eval", "Held-out perplexity and distance to true topics");
    evalc->add_option("--model", eo.model, "Model JSON")->required();
    evalc->add_option("--heldout", eo.heldout, "Held-out corpus directory or docword file")->required();
    evalc->add_option("--truth", eo.truth, "Ground-truth JSON from simulate");
    evalc->add_option("--out", eo.out, "Report JSON path (default: standard output)");
    evalc->add_option("--perplexity-mode", eo.perplexity_mode, "corpus|per-doc")
        ->check(CLI::IsMember({"corpus", "per-doc"}));
    evalc->add_option("--matching", eo.matching, "bottleneck|hungarian")
        ->check(CLI::IsMember({"bottleneck", "hungarian"}));
    add_common(evalc, common);

    TopicsOptions to;
    auto* topics = app.add_subcommand("topics", "Print the top words of every topic");
    topics->add_option("--model", to.model, "Model JSON")->required();
    topics->add_option("--vocab", to.vocab, "Vocabulary file, one word per line")->required();
    topics->add_option("--top", to.top, "Words per topic")->capture_default_str();
    add_common(topics, common);

    SplitOptions so;
    auto* split = app.add_subcommand("split", "Hold out a random subset of documents");
    split->add_option("--in", so.in, "Corpus directory or docword file")->required();
    split->add_option("--n", so.n, "Number of held-out documents")->required();
    split->add_option("--seed", so.seed, "Random seed")->required();
    split->add_option("--train", so.train, "Output directory for the training part")->required();
    split->add_option("--test", so.test, "Output directory for the held-out part")->required();
    add_common(split, common);

    SweepOptions sw;
    sw.sim = SimulateOptions{5, 100, 500, "100", 0.1, 0.1, 0, ""};
    sw.fit.algo = "gdm";
    auto* sweep = app.add_subcommand("sweep", "Simulate and fit over a parameter grid, CSV output");
    add_simulate_flags(sweep, sw.sim, false);
    sweep->add_option("--seed", sw.sim.seed, "Seed for simulation and fitting")->capture_default_str();
    add_fit_flags(sweep, sw.fit);
    sweep->get_option("--algo")->required(false);
    sweep->add_option("--fit-K", sw.fit_K, "Topics to fit (default: the simulated K)");
    sweep->add_option("--grid", sw.grid, "name=v1,v2,... (repeatable); names: K V M Nm alpha eta seed lambda fit_K restarts");
    sweep->add_option("--holdout", sw.holdout, "Held-out documents per setting for perplexity (0 = none)");
    sweep->add_option("--out", sw.out, "CSV path (default: standard output)");
    add_common(sweep, common);

    ReplayOptions ro;
    auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->add_option("--from", ro.manifest, "Manifest to replay")->required();
    replay->add_option("--threads", ro.threads, "Override the recorded thread cap");
    replay->add_option("--manifest", common.manifest, "Where to write this run's manifest");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        app.exit(e, out, err);
        return kExitUsage;
    }

    CLI::App* cmd = app.get_subcommands().front();
    configure_logging(common.log_level, err);
    set_max_threads(common.threads);
    RunRecord rec;
    rec.command = cmd->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        if (cmd == replay) {
            const Json manifest = read_json_file(ro.manifest);
            std::vector<std::string> inner = manifest.at("argv").get<std::vector<std::string>>();
            if (ro.threads) {
                for (auto it = inner.begin(); it != inner.end();) {
                    if (*it == "--threads" && it + 1 != inner.end()) it = inner.erase(it, it + 2);
                    else if (it->rfind("--threads=", 0) == 0) it = inner.erase(it);
                    else ++it;
                }
                inner.push_back("--threads");
                inner.push_back(std::to_string(*ro.threads));
            }
            rec.parameters = {{"argv", inner}};
            rec.inputs = {ro.manifest};
            const int code = run(inner, out, err, false);
            if (code != kExitOk) return code;
        } else if (cmd == simulate) {
            run_simulate(sim, out, rec);
        } else if (cmd == fitc) {
            run_fit(fo, out, rec);
        } else if (cmd == evalc) {
            run_eval(eo, out, rec);
        } else if (cmd == topics) {
            run_topics(to, out, rec);
        } else if (cmd == split) {
            run_split(so, out, rec);
        } else if (cmd == sweep) {
            run_sweep(sw, out, rec);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << cmd->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (write_manifest) {
        try {
            emit_manifest(make_manifest(rec, args, common.threads, seconds),
                          common.manifest.empty() ? rec.default_manifest : common.manifest, err);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run(args, out, err, true);
}

}  // namespace gdm
