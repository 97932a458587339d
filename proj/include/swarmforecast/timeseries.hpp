#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swarmforecast {

/// Calendar month. Arithmetic works on the linear index year*12 + (month-1).
struct YearMonth {
    int year = 0;
    int month = 1; // 1..12

    int index() const { return year * 12 + (month - 1); }
    static YearMonth from_index(int idx);

    YearMonth next() const { return from_index(index() + 1); }

    bool operator==(const YearMonth& o) const = default;
    auto operator<=>(const YearMonth& o) const { return index() <=> o.index(); }

    /// "YYYY-MM"
    std::string str() const;
    static YearMonth parse(std::string_view text);
};

/// Ordered monthly observations in kWh/t. Months are consecutive with no
/// gaps, values finite and positive, series non-empty.
class TimeSeries {
public:
    struct Point {
        YearMonth month;
        double value = 0.0;
    };

    /// Validates ordering, gaps, duplicates and value range.
    explicit TimeSeries(std::vector<Point> points);

    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const Point& at(std::size_t i) const { return points_[i]; }
    YearMonth first_month() const { return points_.front().month; }
    YearMonth last_month() const { return points_.back().month; }

    std::vector<double> values() const;

private:
    std::vector<Point> points_;
};

/// Min-max scaling range fitted on training data.
struct NormalizationParams {
    double min = 0.0;
    double max = 1.0;
};

/// One supervised pair in normalized space.
struct Sample {
    std::vector<double> inputs;
    std::vector<double> targets;
};

/// Sliding-window view of a normalized series: inputs are window_len
/// consecutive values, the target is the value that follows them.
struct WindowedDataset {
    std::size_t window_len = 0;
    std::vector<Sample> samples;
    NormalizationParams norm;
};

/// Reads a `month,value` CSV document. Lines starting with '#' and blank
/// lines are skipped; rows may appear in any order and are sorted by month.
/// Throws ValidationError with the offending line number on malformed rows,
/// and on duplicate months, month gaps or non-positive/non-finite values.
TimeSeries parse_series_csv(std::string_view text);

/// Canonical CSV form: header `month,value`, shortest round-trip numbers,
/// '\n' line endings. parse_series_csv(serialize_series_csv(s)) == s.
std::string serialize_series_csv(const TimeSeries& series);

/// Series extremes. Throws ValidationError when all values are equal.
NormalizationParams fit_normalization(const TimeSeries& series);

double normalize(double value, const NormalizationParams& params);
double denormalize(double value, const NormalizationParams& params);

/// Builds length-window_len supervised windows over the normalized series.
/// Sample count = series length - window_len; throws when the series is too
/// short to produce at least one sample.
WindowedDataset make_windows(const TimeSeries& series, std::size_t window_len,
                             const NormalizationParams& params);

/// Splits into (months < boundary, months >= boundary). The boundary must lie
/// strictly inside the series range so both parts are non-empty.
std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series,
                                                   YearMonth boundary);

} // namespace swarmforecast
