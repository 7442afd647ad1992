#pragma once

#include "uncertain_eval/error.hpp"
#include "uncertain_eval/feedback.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uncertain_eval {

struct HistogramBin;

// Raised for malformed CSV input; line is 1-based (the header is line 1).
class CsvError : public InputError {
public:
    CsvError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace csv {

inline constexpr const char* kObservationHeader = "user_id,item_id,trial,rating";
inline constexpr const char* kFeedbackHeader = "user_id,item_id,mu,sigma";
inline constexpr const char* kPredictionHeader = "user_id,item_id,prediction";
inline constexpr const char* kHistogramHeader = "bin_lo,bin_hi,count";
inline constexpr const char* kSampleHeader = "sample_index,score";

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Reads the observation format. Without an explicit scale the scale is
/// taken as the continuous range spanned by the observed ratings.
ObservationSet read_observations(std::istream& in, std::optional<RatingScale> scale = {});
void write_observations(std::ostream& out, const ObservationSet& obs);

FeedbackDataset read_feedback(std::istream& in);
void write_feedback(std::ostream& out, const FeedbackDataset& data);

PredictionSet read_predictions(std::istream& in);
void write_predictions(std::ostream& out, const PredictionSet& predictions);

void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins);
void write_samples(std::ostream& out, const std::vector<double>& samples);

ObservationSet read_observations_file(const std::string& path,
                                      std::optional<RatingScale> scale = {});
FeedbackDataset read_feedback_file(const std::string& path);
PredictionSet read_predictions_file(const std::string& path);

} // namespace csv
} // namespace uncertain_eval
