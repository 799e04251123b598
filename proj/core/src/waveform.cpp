#include "jjgz/waveform.hpp"

#include "jjgz/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string_view>

namespace jjgz {

namespace {

[[noreturn]] void domain_error(const std::string& what)
{
    throw Error(ErrorKind::domain, "model", what);
}

[[noreturn]] void ingestion_error(std::size_t line, const std::string& what)
{
    throw Error(ErrorKind::ingestion, "model", "waveform table line " + std::to_string(line) + ": " + what,
                "check the CSV against the 't,mu' / 't,phi_e' format");
}

bool finite(double v) { return std::isfinite(v); }

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace

const char* to_string(WaveformKind kind) noexcept
{
    switch (kind) {
    case WaveformKind::instantaneous_step: return "instantaneous_step";
    case WaveformKind::tanh_ramp: return "tanh_ramp";
    case WaveformKind::piecewise_linear_table: return "piecewise_linear_table";
    }
    return "unknown";
}

Waveform Waveform::step(double mu_initial, double mu_final, double t_inv, double t_end)
{
    if (!(finite(mu_initial) && finite(mu_final)))
        domain_error("step levels must be finite");
    if (!(finite(t_end) && t_end > 0.0))
        domain_error("waveform duration must be positive");
    if (!(finite(t_inv) && t_inv > 0.0 && t_inv < t_end))
        domain_error("step time must lie strictly inside (0, t_end)");
    Waveform w;
    w.kind_ = WaveformKind::instantaneous_step;
    w.mu_i_ = mu_initial;
    w.mu_f_ = mu_final;
    w.switch_time_ = t_inv;
    w.t_end_ = t_end;
    return w;
}

Waveform Waveform::tanh_ramp(double mu_initial, double mu_final, double center, double width, double t_end)
{
    if (!(finite(mu_initial) && finite(mu_final)))
        domain_error("ramp levels must be finite");
    if (!(finite(t_end) && t_end > 0.0))
        domain_error("waveform duration must be positive");
    if (!(finite(width) && width > 0.0))
        domain_error("ramp width must be positive");
    if (!(finite(center) && center > 0.0 && center < t_end))
        domain_error("ramp center must lie strictly inside (0, t_end)");
    Waveform w;
    w.kind_ = WaveformKind::tanh_ramp;
    w.mu_i_ = mu_initial;
    w.mu_f_ = mu_final;
    w.switch_time_ = center;
    w.width_ = width;
    w.t_end_ = t_end;
    return w;
}

Waveform Waveform::table(std::vector<double> times, std::vector<double> mu, std::optional<double> t_end)
{
    if (times.size() != mu.size())
        domain_error("table columns differ in length");
    if (times.size() < 2)
        domain_error("table needs at least two samples");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!finite(times[i]) || !finite(mu[i]))
            domain_error("table sample " + std::to_string(i) + " is not finite");
        if (i > 0 && !(times[i] > times[i - 1]))
            domain_error("table times must be strictly increasing (sample " + std::to_string(i) + ")");
    }
    if (times.front() < 0.0)
        domain_error("table times must be non-negative");
    const double end = t_end.value_or(times.back());
    if (!(finite(end) && end > 0.0 && end >= times.back()))
        domain_error("table duration must cover the last sample");
    Waveform w;
    w.kind_ = WaveformKind::piecewise_linear_table;
    w.times_ = std::move(times);
    w.values_ = std::move(mu);
    w.t_end_ = end;
    w.mu_i_ = w.values_.front();
    w.mu_f_ = w.values_.back();
    return w;
}

double Waveform::base(double t) const
{
    switch (kind_) {
    case WaveformKind::instantaneous_step:
        return t <= switch_time_ ? mu_i_ : mu_f_;
    case WaveformKind::tanh_ramp:
        return 0.5 * (mu_i_ + mu_f_) - 0.5 * (mu_i_ - mu_f_) * std::tanh((t - switch_time_) / width_);
    case WaveformKind::piecewise_linear_table: {
        if (t <= times_.front())
            return values_.front();
        if (t >= times_.back())
            return values_.back();
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto j = static_cast<std::size_t>(it - times_.begin());
        const double t0 = times_[j - 1];
        const double t1 = times_[j];
        const double f = (t - t0) / (t1 - t0);
        return values_[j - 1] + f * (values_[j] - values_[j - 1]);
    }
    }
    return 0.0;
}

double Waveform::operator()(double t) const
{
    if (!(t >= 0.0 && t <= t_end_))
        domain_error("waveform evaluated at t = " + std::to_string(t) + " outside [0, " + std::to_string(t_end_) +
                     "]");
    return base(t) + offset_;
}

double Waveform::node_value(double t) const
{
    if (kind_ == WaveformKind::instantaneous_step && t == switch_time_)
        return 0.5 * (mu_i_ + mu_f_) + offset_;
    return (*this)(t);
}

std::optional<double> Waveform::jump_time() const
{
    if (kind_ == WaveformKind::instantaneous_step)
        return switch_time_;
    return std::nullopt;
}

bool Waveform::has_sign_inversion() const { return mu_initial() > 0.0 && mu_final() < 0.0; }

Waveform Waveform::extended(double pre, double post) const
{
    if (!(finite(pre) && finite(post) && pre >= 0.0 && post >= 0.0))
        domain_error("waveform extension must be non-negative");
    Waveform w = *this;
    w.t_end_ = t_end_ + pre + post;
    switch (kind_) {
    case WaveformKind::instantaneous_step:
    case WaveformKind::tanh_ramp:
        w.switch_time_ = switch_time_ + pre;
        break;
    case WaveformKind::piecewise_linear_table:
        for (double& t : w.times_)
            t += pre;
        break;
    }
    return w;
}

Waveform Waveform::with_duration(double duration) const
{
    if (!(finite(duration) && duration > 0.0))
        domain_error("duration must be positive");
    if (kind_ == WaveformKind::piecewise_linear_table) {
        if (duration < t_end_)
            domain_error("a tabulated waveform cannot be shortened below its sampled duration");
        const double pad = 0.5 * (duration - t_end_);
        return extended(pad, pad);
    }
    Waveform w = *this;
    w.switch_time_ = switch_time_ * duration / t_end_;
    w.t_end_ = duration;
    return w;
}

Waveform Waveform::shifted(double delta_mu) const
{
    if (!finite(delta_mu))
        domain_error("shift must be finite");
    Waveform w = *this;
    w.offset_ += delta_mu;
    return w;
}

Waveform load_waveform_table(std::istream& in, std::optional<TableColumn> expected)
{
    std::string line;
    std::size_t line_no = 0;
    std::optional<TableColumn> column;
    std::vector<double> times;
    std::vector<double> values;
    std::size_t first_data_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF &&
            static_cast<unsigned char>(view[1]) == 0xBB && static_cast<unsigned char>(view[2]) == 0xBF)
            view = trim(view.substr(3));
        if (view.empty() || view.front() == '#')
            continue;

        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
            ingestion_error(line_no, "expected exactly two comma separated fields");
        const auto lhs = trim(view.substr(0, comma));
        const auto rhs = trim(view.substr(comma + 1));

        if (!column) {
            if (lhs != "t" || (rhs != "mu" && rhs != "phi_e"))
                ingestion_error(line_no, "header must be 't,mu' or 't,phi_e'");
            column = rhs == "mu" ? TableColumn::mu : TableColumn::phi_e;
            if (expected && *expected != *column)
                ingestion_error(line_no, "header column does not match the requested column kind");
            continue;
        }

        const auto t = parse_double(lhs);
        const auto v = parse_double(rhs);
        if (!t || !v)
            ingestion_error(line_no, "cannot parse a decimal number");
        if (!std::isfinite(*t) || !std::isfinite(*v))
            ingestion_error(line_no, "NaN or infinite value");
        if (!times.empty() && !(*t > times.back()))
            ingestion_error(line_no, "time is not strictly increasing");
        if (times.empty()) {
            if (*t < 0.0)
                ingestion_error(line_no, "negative time");
            first_data_line = line_no;
        }
        times.push_back(*t);
        values.push_back(*column == TableColumn::phi_e ? std::cos(0.5 * *v) : *v);
    }

    if (!column)
        ingestion_error(std::max<std::size_t>(line_no, 1), "missing header");
    if (times.size() < 2)
        ingestion_error(line_no, "at least two data rows are required");
    if (!(values.front() > 0.0))
        ingestion_error(first_data_line, "initial curvature mu(0) must be positive");
    if (!(values.back() < 0.0))
        ingestion_error(line_no, "no sign inversion: final curvature must be negative");

    return Waveform::table(std::move(times), std::move(values));
}

Waveform load_waveform_table_file(const std::string& path, std::optional<TableColumn> expected)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::configuration, "model", "cannot open waveform table '" + path + "'");
    return load_waveform_table(in, expected);
}

double inversion_time(const Waveform& w)
{
    const double t_end = w.t_end();
    if (!(w(0.0) > 0.0))
        domain_error("waveform does not start with positive curvature");

    // Bracket the first crossing on a scan that includes every table node.
    std::vector<double> scan;
    constexpr std::size_t n_scan = 4096;
    scan.reserve(n_scan + 1 + w.table_times().size());
    for (std::size_t i = 0; i <= n_scan; ++i)
        scan.push_back(t_end * static_cast<double>(i) / static_cast<double>(n_scan));
    for (double t : w.table_times())
        if (t <= t_end)
            scan.push_back(t);
    if (auto jump = w.jump_time()) {
        scan.push_back(*jump);
        scan.push_back(std::nextafter(*jump, t_end));
    }
    std::sort(scan.begin(), scan.end());

    double lo = 0.0;
    double hi = -1.0;
    for (std::size_t i = 1; i < scan.size(); ++i) {
        const double v = w(scan[i]);
        if (v == 0.0)
            return scan[i];
        if (v < 0.0) {
            lo = scan[i - 1];
            hi = scan[i];
            break;
        }
    }
    if (hi < 0.0)
        domain_error("waveform has no curvature sign change");

    const double tol = 1e-10 * t_end;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double v = w(mid);
        if (v == 0.0)
            return mid;
        if (v > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Waveform renormalize_inductance(const Waveform& w, double lambda)
{
    if (std::isinf(lambda) && lambda > 0.0)
        return w;
    if (!(lambda > 0.0))
        throw Error(ErrorKind::domain, "model", "inductance parameter lambda must be positive");
    return w.shifted(0.5 / lambda);
}

double settle_margin(double beta_c)
{
    const double s = std::sqrt(beta_c);
    return 10.0 * std::max(s, 2.0 / s);
}

double lead_time(double beta_c)
{
    const double s = std::sqrt(beta_c);
    return 20.0 * std::max(s, 1.0 / s);
}

Waveform default_step(double beta_c, double mu_initial)
{
    const double lead = lead_time(beta_c);
    return Waveform::step(mu_initial, -mu_initial, lead, lead + settle_margin(beta_c));
}

} // namespace jjgz
