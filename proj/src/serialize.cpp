#include "gdm/serialize.hpp"

#include <fstream>

#include "gdm/error.hpp"

namespace gdm {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("expected a nonempty array of rows");
    const auto cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ValidationError("ragged matrix in JSON");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

Json config_to_json(const GdmConfig& c) {
    Json j;
    j["K"] = c.K ? Json(*c.K) : Json(nullptr);
    j["lambda"] = c.lambda ? Json(*c.lambda) : Json(nullptr);
    j["restarts"] = c.restarts;
    j["max_iters"] = c.max_iters;
    j["weighted_center"] = c.weighted_center;
    j["tune"] = c.tune;
    j["seed"] = c.seed;
    j["dp_rule"] = c.dp_rule == DpOpeningRule::kWeighted ? "weighted" : "unweighted";
    return j;
}

GdmConfig config_from_json(const Json& j) {
    GdmConfig c;
    if (j.contains("K") && !j["K"].is_null()) c.K = j["K"].get<std::size_t>();
    if (j.contains("lambda") && !j["lambda"].is_null()) c.lambda = j["lambda"].get<double>();
    c.restarts = j.value("restarts", c.restarts);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.weighted_center = j.value("weighted_center", c.weighted_center);
    c.tune = j.value("tune", c.tune);
    c.seed = j.value("seed", c.seed);
    const std::string rule = j.value("dp_rule", std::string("weighted"));
    if (rule == "weighted") c.dp_rule = DpOpeningRule::kWeighted;
    else if (rule == "unweighted") c.dp_rule = DpOpeningRule::kUnweighted;
    else throw ValidationError("unknown dp_rule '" + rule + "'");
    return c;
}

Json model_to_json(const GdmModel& model) {
    Json j;
    j["beta"] = matrix_to_json(model.polytope.vertices());
    j["center"] = vector_to_json(model.center);
    j["centroids"] = matrix_to_json(model.centroids);
    j["extensions"] = model.extensions;
    j["radii"] = model.radii;
    j["objective"] = model.objective;
    j["penalty"] = model.penalty;
    j["config"] = config_to_json(model.config);
    return j;
}

GdmModel model_from_json(const Json& j) {
    try {
        TopicPolytope polytope(matrix_from_json(j.at("beta")));
        GdmModel model{std::move(polytope),
                       vector_from_json(j.at("center")),
                       matrix_from_json(j.at("centroids")),
                       j.at("extensions").get<std::vector<double>>(),
                       j.at("radii").get<std::vector<double>>(),
                       j.at("objective").get<double>(),
                       j.value("penalty", 0.0),
                       {},
                       config_from_json(j.at("config"))};
        const auto K = model.polytope.num_topics();
        if (model.extensions.size() != K || model.radii.size() != K ||
            static_cast<std::size_t>(model.centroids.rows()) != K)
            throw ValidationError("model fields disagree on the number of topics");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model JSON: ") + e.what());
    }
}

Json params_to_json(const LdaParams& p) {
    Json j;
    j["K"] = p.K;
    j["V"] = p.V;
    j["M"] = p.M;
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ConstantLength>) {
                j["doc_lengths"] = {{"constant", spec.tokens}};
            } else if constexpr (std::is_same_v<T, LengthRange>) {
                j["doc_lengths"] = {{"min", spec.min}, {"max", spec.max}};
            } else {
                j["doc_lengths"] = {{"list", spec.tokens}};
            }
        },
        p.doc_lengths);
    j["alpha"] = p.alpha;
    j["eta"] = p.eta;
    j["seed"] = p.seed;
    return j;
}

LdaParams params_from_json(const Json& j) {
    try {
        LdaParams p;
        p.K = j.at("K").get<std::size_t>();
        p.V = j.at("V").get<std::size_t>();
        p.M = j.at("M").get<std::size_t>();
        const Json& len = j.at("doc_lengths");
        if (len.contains("constant")) p.doc_lengths = ConstantLength{len["constant"].get<std::uint64_t>()};
        else if (len.contains("list")) p.doc_lengths = LengthList{len["list"].get<std::vector<std::uint64_t>>()};
        else p.doc_lengths = LengthRange{len.at("min").get<std::uint64_t>(), len.at("max").get<std::uint64_t>()};
        p.alpha = j.at("alpha").get<double>();
        p.eta = j.at("eta").get<double>();
        p.seed = j.at("seed").get<std::uint64_t>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed parameter JSON: ") + e.what());
    }
}

Json truth_to_json(const GroundTruth& truth) {
    Json j;
    j["beta"] = matrix_to_json(truth.beta);
    j["theta"] = matrix_to_json(truth.theta);
    j["params"] = params_to_json(truth.params);
    return j;
}

GroundTruth truth_from_json(const Json& j) {
    try {
        GroundTruth t;
        t.beta = matrix_from_json(j.at("beta"));
        t.theta = matrix_from_json(j.at("theta"));
        if (t.theta.cols() != t.beta.rows()) throw ValidationError("theta and beta disagree on K");
        t.p = t.theta * t.beta;
        t.params = params_from_json(j.at("params"));
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed truth JSON: ") + e.what());
    }
}

Json report_to_json(const PerplexityReport& r) {
    Json j;
    j["perplexity"] = r.perplexity;
    j["total_log_likelihood"] = r.total_log_likelihood;
    j["total_tokens"] = r.total_tokens;
    j["floored_entries"] = r.floored_entries;
    return j;
}

Json report_to_json(const BoundReport& r) {
    Json j;
    j["log_likelihood"] = r.log_likelihood;
    j["empirical_log_likelihood"] = r.empirical_log_likelihood;
    j["quadratic_term"] = r.quadratic_term;
    j["chi_square_term"] = r.chi_square_term;
    j["full_chi_square_term"] = r.full_chi_square_term;
    j["upper_slack"] = r.upper_slack;
    j["lower_slack"] = r.lower_slack;
    j["full_lower_slack"] = r.full_lower_slack;
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace gdm
