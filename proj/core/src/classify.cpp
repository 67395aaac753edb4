#include "radact/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radact/errors.hpp"

namespace radact::classify {

namespace {

void append_class(ClassSet& set, const ActionClass& a) {
    if (!states::contains(set, a)) set.push_back(a);
}

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace

KnnModel knn_train(const std::vector<std::pair<std::vector<double>, ActionClass>>& samples,
                   std::uint32_t k) {
    if (samples.empty()) throw ConfigError("knn_train: no training samples");
    if (k < 1) throw ConfigError("knn_train: k must be at least 1");
    if (k > samples.size())
        throw ConfigError("knn_train: k exceeds the number of samples");

    KnnModel model;
    model.k = k;
    const std::size_t dim = samples[0].first.size();
    for (const auto& [vec, label] : samples) {
        if (vec.size() != dim)
            throw ShapeError("knn_train: feature vectors have unequal lengths");
        model.exemplar_features.push_back(vec);
        model.exemplar_labels.push_back(label);
        append_class(model.class_set, label);
    }
    return model;
}

KnnModel knn_train(const std::vector<std::pair<features::FeatureVector, ActionClass>>& samples,
                   std::uint32_t k) {
    std::vector<std::pair<std::vector<double>, ActionClass>> raw;
    raw.reserve(samples.size());
    for (const auto& [fv, label] : samples) raw.emplace_back(fv.fused, label);
    return knn_train(raw, k);
}

Prediction knn_predict(const KnnModel& model, const std::vector<double>& x,
                       const ClassSet& allowed) {
    if (allowed.empty()) throw EmptyClassSetError("knn_predict: allowed set is empty");
    if (x.size() != model.dim())
        throw ShapeError("knn_predict: probe length does not match exemplars");

    std::vector<std::pair<double, std::size_t>> dists; // (distance, exemplar index)
    for (std::size_t i = 0; i < model.exemplar_features.size(); ++i) {
        if (!states::contains(allowed, model.exemplar_labels[i])) continue;
        dists.emplace_back(sq_distance(x, model.exemplar_features[i]), i);
    }
    if (dists.empty())
        throw EmptyClassSetError("knn_predict: no exemplar of any allowed class");

    const std::size_t k_eff = std::min<std::size_t>(model.k, dists.size());
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(k_eff - 1),
                     dists.end());
    const double kth = dists[k_eff - 1].first;

    // All exemplars at the k-th distance participate, so results do not
    // depend on storage order.
    struct ClassStat {
        std::size_t votes = 0;
        double dist_sum = 0.0;
    };
    std::vector<ClassStat> stats(model.class_set.size());
    std::size_t neighbours = 0;
    for (const auto& [d, idx] : dists) {
        if (d > kth) continue;
        ++neighbours;
        const auto cls = static_cast<std::size_t>(
            std::find(model.class_set.begin(), model.class_set.end(),
                      model.exemplar_labels[idx]) -
            model.class_set.begin());
        ++stats[cls].votes;
        stats[cls].dist_sum += std::sqrt(d);
    }

    Prediction pred;
    long best = -1;
    for (std::size_t c = 0; c < model.class_set.size(); ++c) {
        if (!states::contains(allowed, model.class_set[c])) continue;
        pred.votes.emplace_back(model.class_set[c], stats[c].votes);
        if (stats[c].votes == 0) continue;
        const double mean_d = stats[c].dist_sum / static_cast<double>(stats[c].votes);
        if (best < 0 || stats[c].votes > stats[static_cast<std::size_t>(best)].votes ||
            (stats[c].votes == stats[static_cast<std::size_t>(best)].votes &&
             mean_d < stats[static_cast<std::size_t>(best)].dist_sum /
                          static_cast<double>(stats[static_cast<std::size_t>(best)].votes))) {
            best = static_cast<long>(c);
        }
    }
    if (best < 0) throw InternalError("knn_predict: vote produced no winner");

    const auto b = static_cast<std::size_t>(best);
    pred.label = model.class_set[b];
    pred.mean_distance = stats[b].dist_sum / static_cast<double>(stats[b].votes);
    pred.share = static_cast<double>(stats[b].votes) / static_cast<double>(neighbours);
    return pred;
}

std::int64_t ConfusionMatrix::row_total(std::size_t i) const {
    std::int64_t acc = 0;
    for (std::size_t j = 0; j < counts.cols(); ++j) acc += counts(i, j);
    return acc;
}

double ConfusionMatrix::miss(std::size_t c) const {
    return row_total(c) == 0 ? 0.0 : 1.0 - rates(c, c);
}

double ConfusionMatrix::false_alarm(std::size_t c) const {
    std::int64_t hits = 0, total = 0;
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        if (i == c) continue;
        hits += counts(i, c);
        total += row_total(i);
    }
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

double ConfusionMatrix::accuracy() const {
    std::int64_t diag = 0, total = 0;
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        diag += counts(i, i);
        total += row_total(i);
    }
    return total == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(total);
}

ConfusionMatrix confusion_matrix(const std::vector<ActionClass>& predictions,
                                 const std::vector<ActionClass>& truths,
                                 const ClassSet& class_set) {
    if (predictions.size() != truths.size())
        throw ShapeError("confusion_matrix: prediction/truth lengths differ");

    auto index_of = [&](const ActionClass& a) {
        const auto it = std::find(class_set.begin(), class_set.end(), a);
        if (it == class_set.end())
            throw LabelError("confusion_matrix: label outside the class set: " +
                             states::to_string(a));
        return static_cast<std::size_t>(it - class_set.begin());
    };

    ConfusionMatrix cm;
    cm.class_set = class_set;
    cm.counts = Matrix<std::int64_t>(class_set.size(), class_set.size(), 0);
    for (std::size_t i = 0; i < truths.size(); ++i)
        ++cm.counts(index_of(truths[i]), index_of(predictions[i]));

    cm.rates = RealMatrix(class_set.size(), class_set.size(), 0.0);
    for (std::size_t i = 0; i < class_set.size(); ++i) {
        const std::int64_t total = cm.row_total(i);
        if (total == 0) continue;
        for (std::size_t j = 0; j < class_set.size(); ++j)
            cm.rates(i, j) =
                static_cast<double>(cm.counts(i, j)) / static_cast<double>(total);
    }
    return cm;
}

std::string to_json(const ConfusionMatrix& cm) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    j["counts"] = nlohmann::json::array();
    j["rates"] = nlohmann::json::array();
    j["per_class"] = nlohmann::json::array();
    for (const auto& c : cm.class_set) j["classes"].push_back(states::to_string(c));
    for (std::size_t i = 0; i < cm.counts.rows(); ++i) {
        nlohmann::json crow = nlohmann::json::array();
        nlohmann::json rrow = nlohmann::json::array();
        for (std::size_t k = 0; k < cm.counts.cols(); ++k) {
            crow.push_back(cm.counts(i, k));
            rrow.push_back(cm.rates(i, k));
        }
        j["counts"].push_back(crow);
        j["rates"].push_back(rrow);
    }
    for (std::size_t c = 0; c < cm.class_set.size(); ++c) {
        j["per_class"].push_back({{"class", states::to_string(cm.class_set[c])},
                                  {"miss", cm.miss(c)},
                                  {"false_alarm", cm.false_alarm(c)}});
    }
    j["accuracy"] = cm.accuracy();
    return j.dump(2);
}

std::string render_text(const ConfusionMatrix& cm, const std::string& title) {
    std::ostringstream os;
    if (!title.empty()) os << title << "\n";

    std::size_t width = 8;
    for (const auto& c : cm.class_set)
        width = std::max(width, states::to_string(c).size() + 2);

    auto pad = [&](const std::string& s) {
        std::string out = s;
        while (out.size() < width) out.insert(out.begin(), ' ');
        return out;
    };

    os << pad("true\\pred");
    for (const auto& c : cm.class_set) os << pad(states::to_string(c));
    os << "\n";
    for (std::size_t i = 0; i < cm.class_set.size(); ++i) {
        os << pad(states::to_string(cm.class_set[i]));
        for (std::size_t j = 0; j < cm.class_set.size(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * cm.rates(i, j));
            os << pad(buf);
        }
        os << "\n";
    }
    return os.str();
}

namespace {

template <typename T>
void put(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!f) throw IoError("knn model file truncated");
    return v;
}

} // namespace

void save_knn(const KnnModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write("KNN1", 4);
    put<std::uint32_t>(f, model.k);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.class_set.size()));
    for (const auto& c : model.class_set) {
        put<std::uint8_t>(f, static_cast<std::uint8_t>(c.kind));
        put<std::uint8_t>(f, static_cast<std::uint8_t>(c.group));
    }
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.exemplar_features.size()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.dim()));
    for (std::size_t i = 0; i < model.exemplar_features.size(); ++i) {
        const auto it = std::find(model.class_set.begin(), model.class_set.end(),
                                  model.exemplar_labels[i]);
        put<std::uint32_t>(f, static_cast<std::uint32_t>(it - model.class_set.begin()));
        for (double v : model.exemplar_features[i]) put<double>(f, v);
    }
    if (!f) throw IoError("write failed for " + path);
}

KnnModel load_knn(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "KNN1")
        throw IoError("bad magic in " + path);

    KnnModel model;
    model.k = get<std::uint32_t>(f);
    const auto n_classes = get<std::uint32_t>(f);
    for (std::uint32_t i = 0; i < n_classes; ++i) {
        const auto kind = get<std::uint8_t>(f);
        const auto group = get<std::uint8_t>(f);
        model.class_set.push_back(
            {static_cast<states::ActionKind>(kind), static_cast<states::Group>(group)});
    }
    const auto n_ex = get<std::uint32_t>(f);
    const auto dim = get<std::uint32_t>(f);
    for (std::uint32_t i = 0; i < n_ex; ++i) {
        const auto cls = get<std::uint32_t>(f);
        if (cls >= n_classes) throw IoError("corrupt class index in " + path);
        std::vector<double> vec(dim);
        for (auto& v : vec) v = get<double>(f);
        model.exemplar_labels.push_back(model.class_set[cls]);
        model.exemplar_features.push_back(std::move(vec));
    }
    return model;
}

} // namespace radact::classify
