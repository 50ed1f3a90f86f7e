#include "mixclust/model_io.hpp"

#include <fstream>
#include <string>

#include "mixclust/errors.hpp"

namespace mixclust {

using nlohmann::json;

namespace {

Vector vector_from(const json& arr, const char* what) {
    if (!arr.is_array()) throw ValidationError(std::string(what) + " must be an array");
    Vector out(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ValidationError(std::string(what) + " must contain numbers");
        out(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return out;
}

json vector_to(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

// Accepts either "<plural>": [..] or "<singular>": x broadcast to length F.
Vector per_coordinate(const json& params, const char* plural, const char* singular,
                      Eigen::Index dim) {
    if (params.contains(plural)) return vector_from(params.at(plural), plural);
    if (params.contains(singular)) {
        if (!params.at(singular).is_number()) {
            throw ValidationError(std::string(singular) + " must be a number");
        }
        return Vector::Constant(dim, params.at(singular).get<double>());
    }
    throw ValidationError(std::string("component params need '") + plural + "' or '" + singular +
                          "'");
}

ComponentDistribution component_from(const json& c, Eigen::Index dim) {
    if (!c.is_object() || !c.contains("family")) {
        throw ValidationError("component must be an object with a 'family'");
    }
    const std::string family = c.at("family").get<std::string>();
    const json params = c.value("params", json::object());
    if (family == "spherical_gaussian") {
        if (!params.contains("variance")) throw ValidationError("spherical_gaussian needs 'variance'");
        return ComponentDistribution::spherical_gaussian(params.at("variance").get<double>());
    }
    if (family == "point_mass") return ComponentDistribution::point_mass();
    if (family == "diagonal_gaussian") {
        return ComponentDistribution::diagonal_gaussian(
            per_coordinate(params, "variances", "variance", dim));
    }
    if (family == "laplace") {
        return ComponentDistribution::laplace(per_coordinate(params, "scales", "scale", dim));
    }
    if (family == "uniform_box") {
        return ComponentDistribution::uniform_box(
            per_coordinate(params, "half_widths", "half_width", dim));
    }
    throw ValidationError("unknown component family '" + family + "'");
}

json component_to(const ComponentDistribution& c) {
    json params;
    switch (c.family()) {
        case Family::SphericalGaussian: params["variance"] = c.spherical_variance(); break;
        case Family::DiagonalGaussian: params["variances"] = vector_to(c.params()); break;
        case Family::Laplace: params["scales"] = vector_to(c.params()); break;
        case Family::UniformBox: params["half_widths"] = vector_to(c.params()); break;
    }
    return json{{"family", family_name(c.family())}, {"params", params}};
}

json index_to(const SeparabilityIndex& idx) {
    json out;
    out["value"] = idx.value ? json(*idx.value) : json(nullptr);
    out["holds"] = idx.holds;
    out["reason"] = idx.reason;
    return out;
}

}  // namespace

MixtureModel model_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw ValidationError("model document must be an object");
        const int k = doc.at("K").get<int>();
        const auto dim = static_cast<Eigen::Index>(doc.at("F").get<long long>());
        if (k < 1 || dim < 1) throw ValidationError("K and F must be positive");

        const Vector weights = vector_from(doc.at("weights"), "weights");
        if (weights.size() != k) throw ValidationError("weights must have K entries");

        Matrix means;
        const json& m = doc.at("means");
        if (m.is_object() && m.contains("hypercube_uniform")) {
            const auto seed = m.at("hypercube_uniform").value("seed", std::uint64_t{0});
            means = hypercube_means(dim, k, seed);
        } else if (m.is_array()) {
            if (static_cast<int>(m.size()) != k) throw ValidationError("means must have K entries");
            means.resize(dim, k);
            for (int j = 0; j < k; ++j) {
                const Vector col = vector_from(m[static_cast<std::size_t>(j)], "mean");
                if (col.size() != dim) throw ValidationError("every mean must have length F");
                means.col(j) = col;
            }
        } else {
            throw ValidationError("means must be an array or {\"hypercube_uniform\": {...}}");
        }

        std::vector<ComponentDistribution> comps;
        const json& c = doc.at("components");
        if (c.is_array()) {
            if (static_cast<int>(c.size()) != k) {
                throw ValidationError("components must have K entries");
            }
            for (const auto& item : c) comps.push_back(component_from(item, dim));
        } else {
            const auto shared = component_from(c, dim);
            comps.assign(static_cast<std::size_t>(k), shared);
        }
        return MixtureModel(weights, std::move(means), std::move(comps));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

MixtureModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

json model_to_json(const MixtureModel& model) {
    json doc;
    doc["K"] = model.k();
    doc["F"] = model.dim();
    doc["weights"] = vector_to(model.weights());
    json means = json::array();
    for (int j = 0; j < model.k(); ++j) means.push_back(vector_to(model.means().col(j)));
    doc["means"] = means;
    json comps = json::array();
    for (const auto& c : model.components()) comps.push_back(component_to(c));
    doc["components"] = comps;
    return doc;
}

json to_json(const SeparabilityReport& r) {
    json out;
    out["K"] = r.k;
    out["lambda_min"] = r.lambda_min;
    out["sigma2_bar"] = r.sigma2_bar ? json(*r.sigma2_bar) : json(nullptr);
    out["sigma2_max"] = r.sigma2_max;
    out["sigma2_min"] = r.sigma2_min;
    out["L_bar"] = r.l_bar;
    out["w_min"] = r.w_min;
    out["w_max"] = r.w_max;
    out["zeta_wmin"] = r.zeta_wmin;
    out["delta0"] = index_to(r.delta0);
    out["delta1"] = index_to(r.delta1);
    out["delta2"] = index_to(r.delta2);
    out["delta3"] = index_to(r.delta3);
    out["a"] = r.a ? json(*r.a) : json(nullptr);
    out["b"] = r.b ? json(*r.b) : json(nullptr);
    return out;
}

json to_json(const NonDegeneracy& nd) {
    return json{{"holds", nd.holds},
                {"rank", nd.rank},
                {"singular_values", vector_to(nd.singular_values)},
                {"diagnostic", nd.diagnostic}};
}

}  // namespace mixclust
