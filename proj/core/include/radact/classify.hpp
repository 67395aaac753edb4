#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radact/features.hpp"
#include "radact/states.hpp"

namespace radact::classify {

using states::ActionClass;
using states::ClassSet;

/// Lazy learner: exemplars stored verbatim.
struct KnnModel {
    std::vector<std::vector<double>> exemplar_features;
    std::vector<ActionClass> exemplar_labels;
    ClassSet class_set; // ordered, unique; fixes tie-break order
    std::uint32_t k = 5;

    std::size_t dim() const {
        return exemplar_features.empty() ? 0 : exemplar_features[0].size();
    }
};

KnnModel knn_train(const std::vector<std::pair<std::vector<double>, ActionClass>>& samples,
                   std::uint32_t k);
KnnModel knn_train(const std::vector<std::pair<features::FeatureVector, ActionClass>>& samples,
                   std::uint32_t k);

struct Prediction {
    ActionClass label;
    std::vector<std::pair<ActionClass, std::size_t>> votes; // allowed classes, model order
    double mean_distance = 0.0; // winner's mean neighbour distance
    double share = 0.0;         // winner votes / neighbours
};

/// Exemplars of classes outside `allowed` are removed before the neighbour
/// search; majority vote among the k nearest (distance ties at the boundary
/// are all included, which keeps results independent of exemplar order).
/// Vote ties break by smaller mean neighbour distance, then class order.
Prediction knn_predict(const KnnModel& model, const std::vector<double>& x,
                       const ClassSet& allowed);

struct ConfusionMatrix {
    ClassSet class_set;
    Matrix<std::int64_t> counts; // rows true, columns predicted
    RealMatrix rates;            // row-normalized

    std::int64_t row_total(std::size_t i) const;
    double miss(std::size_t class_index) const;        // 1 - diagonal rate
    double false_alarm(std::size_t class_index) const; // P(pred = c | true != c)
    double accuracy() const;
};

ConfusionMatrix confusion_matrix(const std::vector<ActionClass>& predictions,
                                 const std::vector<ActionClass>& truths,
                                 const ClassSet& class_set);

/// JSON with ordered class names, integer counts, row rates and per-class
/// miss/false-alarm figures.
std::string to_json(const ConfusionMatrix& cm);

/// Aligned-text rendering, percentages with one decimal.
std::string render_text(const ConfusionMatrix& cm, const std::string& title = "");

void save_knn(const KnnModel& model, const std::string& path);
KnnModel load_knn(const std::string& path);

} // namespace radact::classify
