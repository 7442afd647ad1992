#include "uncertain_eval/csv_io.hpp"

#include "uncertain_eval/simulate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace uncertain_eval::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

// Column positions for the named header fields, in the order requested.
template <std::size_t N>
std::array<std::size_t, N> read_header(std::istream& in, const std::array<const char*, N>& names,
                                       std::size_t& width) {
    std::string line;
    if (!next_line(in, line)) throw CsvError(1, "empty input, expected a header row");
    const auto fields = split(line);
    width = fields.size();
    std::array<std::size_t, N> pos{};
    for (std::size_t i = 0; i < N; ++i) {
        auto it = std::find(fields.begin(), fields.end(), names[i]);
        if (it == fields.end())
            throw CsvError(1, std::string("missing column '") + names[i] + "' in header");
        pos[i] = static_cast<std::size_t>(it - fields.begin());
    }
    return pos;
}

double parse_double(const std::string& text, std::size_t line, const char* column) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(value))
        throw CsvError(line, std::string("invalid number '") + text + "' in column '" + column + "'");
    return value;
}

std::uint64_t parse_trial(const std::string& text, std::size_t line) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw CsvError(line, "invalid trial index '" + text + "'");
    return value;
}

// Calls fn(fields, line_number) for every non-empty data row.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t width, Fn&& fn) {
    std::string line;
    std::size_t number = 1;
    while (next_line(in, line)) {
        ++number;
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != width)
            throw CsvError(number, "expected " + std::to_string(width) + " fields, found " +
                                       std::to_string(fields.size()));
        fn(fields, number);
    }
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

} // namespace

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

ObservationSet read_observations(std::istream& in, std::optional<RatingScale> scale) {
    std::size_t width = 0;
    const auto pos = read_header<4>(in, {"user_id", "item_id", "trial", "rating"}, width);
    ObservationSet obs;
    std::map<FeedbackKey, std::set<std::uint64_t>> seen;
    for_each_row(in, width, [&](const std::vector<std::string>& f, std::size_t line) {
        RatingObservation o{{f[pos[0]], f[pos[1]]}, parse_trial(f[pos[2]], line),
                            parse_double(f[pos[3]], line, "rating")};
        if (!seen[o.key].insert(o.trial).second)
            throw CsvError(line, "duplicate trial for " + to_string(o.key));
        if (scale && !scale->contains(o.value))
            throw CsvError(line, "rating outside the rating scale");
        obs.observations.push_back(std::move(o));
    });
    if (obs.observations.empty()) throw InputError("observation file has no data rows");
    if (scale) {
        obs.scale = *scale;
    } else {
        auto [lo, hi] = std::minmax_element(
            obs.observations.begin(), obs.observations.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
        obs.scale = {lo->value, hi->value, std::nullopt};
        if (!(obs.scale.min < obs.scale.max)) obs.scale.max = obs.scale.min + 1.0;
    }
    return obs;
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
    out << kObservationHeader << '\n';
    for (const auto& o : obs.observations)
        out << o.key.user_id << ',' << o.key.item_id << ',' << o.trial << ','
            << format_number(o.value) << '\n';
}

FeedbackDataset read_feedback(std::istream& in) {
    std::size_t width = 0;
    const auto pos = read_header<4>(in, {"user_id", "item_id", "mu", "sigma"}, width);
    FeedbackDataset data;
    std::set<FeedbackKey> seen;
    for_each_row(in, width, [&](const std::vector<std::string>& f, std::size_t line) {
        UncertainFeedback e{{f[pos[0]], f[pos[1]]}, parse_double(f[pos[2]], line, "mu"),
                            parse_double(f[pos[3]], line, "sigma"), 0};
        if (e.sigma < 0.0) throw CsvError(line, "negative sigma");
        if (!seen.insert(e.key).second) throw CsvError(line, "duplicate key " + to_string(e.key));
        data.entries.push_back(std::move(e));
    });
    if (data.entries.empty()) throw InputError("feedback file has no data rows");
    auto [lo, hi] = std::minmax_element(data.entries.begin(), data.entries.end(),
                                        [](const auto& a, const auto& b) { return a.mu < b.mu; });
    data.scale = {lo->mu, hi->mu, std::nullopt};
    if (!(data.scale.min < data.scale.max)) data.scale.max = data.scale.min + 1.0;
    return data;
}

void write_feedback(std::ostream& out, const FeedbackDataset& data) {
    out << kFeedbackHeader << '\n';
    for (const auto& e : data.entries)
        out << e.key.user_id << ',' << e.key.item_id << ',' << format_number(e.mu) << ','
            << format_number(e.sigma) << '\n';
}

PredictionSet read_predictions(std::istream& in) {
    std::size_t width = 0;
    const auto pos = read_header<3>(in, {"user_id", "item_id", "prediction"}, width);
    PredictionSet predictions;
    for_each_row(in, width, [&](const std::vector<std::string>& f, std::size_t line) {
        FeedbackKey key{f[pos[0]], f[pos[1]]};
        const double value = parse_double(f[pos[2]], line, "prediction");
        if (!predictions.entries.emplace(key, value).second)
            throw CsvError(line, "duplicate key " + to_string(key));
    });
    return predictions;
}

void write_predictions(std::ostream& out, const PredictionSet& predictions) {
    out << kPredictionHeader << '\n';
    for (const auto& [key, value] : predictions.entries)
        out << key.user_id << ',' << key.item_id << ',' << format_number(value) << '\n';
}

void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins) {
    out << kHistogramHeader << '\n';
    for (const auto& b : bins)
        out << format_number(b.lo) << ',' << format_number(b.hi) << ',' << b.count << '\n';
}

void write_samples(std::ostream& out, const std::vector<double>& samples) {
    out << kSampleHeader << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i)
        out << i << ',' << format_number(samples[i]) << '\n';
}

ObservationSet read_observations_file(const std::string& path, std::optional<RatingScale> scale) {
    auto in = open(path);
    return read_observations(in, scale);
}

FeedbackDataset read_feedback_file(const std::string& path) {
    auto in = open(path);
    return read_feedback(in);
}

PredictionSet read_predictions_file(const std::string& path) {
    auto in = open(path);
    return read_predictions(in);
}

} // namespace uncertain_eval::csv
