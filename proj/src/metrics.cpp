#include "phishdqn/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "phishdqn/errors.hpp"

namespace phishdqn {

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw LengthMismatch("confusion needs " + std::to_string(labels.size()) +
                             " predictions, got " + std::to_string(predictions.size()));
    }
    if (predictions.empty()) {
        throw EmptyInput("confusion over zero samples");
    }
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int l = labels[i];
        if ((p != 0 && p != 1) || (l != 0 && l != 1)) {
            throw BadLabel("prediction and label values must be 0 or 1", i);
        }
        if (p == 1) {
            l == 1 ? ++m.tp : ++m.fp;
        } else {
            l == 1 ? ++m.fn : ++m.tn;
        }
    }
    return m;
}

RelevanceReport report(const ConfusionMatrix& m) {
    if (m.total() == 0) {
        throw EmptyInput("relevance report over an empty confusion matrix");
    }
    RelevanceReport r;
    r.matrix = m;
    const auto tp = static_cast<double>(m.tp);
    if (m.tp + m.fp > 0) {
        r.precision = tp / static_cast<double>(m.tp + m.fp);
    }
    if (m.tp + m.fn > 0) {
        r.recall = tp / static_cast<double>(m.tp + m.fn);
    }
    r.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
        r.f_score = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
    return r;
}

nlohmann::json report_json(const RelevanceReport& r) {
    auto field = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return nlohmann::json{{"tp", r.matrix.tp},           {"tn", r.matrix.tn},
                          {"fp", r.matrix.fp},           {"fn", r.matrix.fn},
                          {"precision", field(r.precision)}, {"recall", field(r.recall)},
                          {"accuracy", field(r.accuracy)},   {"f_score", field(r.f_score)}};
}

std::string report_table(const RelevanceReport& r) {
    auto cell = [](const std::optional<double>& v) {
        if (!v) {
            return std::string("n/a");
        }
        std::ostringstream os;
        os << std::fixed << std::setprecision(3) << *v;
        return os.str();
    };
    std::ostringstream os;
    os << "precision  recall  accuracy  f_score\n";
    os << std::left << std::setw(11) << cell(r.precision) << std::setw(8) << cell(r.recall)
       << std::setw(10) << cell(r.accuracy) << cell(r.f_score) << '\n';
    os << "tp=" << r.matrix.tp << " tn=" << r.matrix.tn << " fp=" << r.matrix.fp
       << " fn=" << r.matrix.fn << " total=" << r.matrix.total() << '\n';
    return os.str();
}

}  // namespace phishdqn
