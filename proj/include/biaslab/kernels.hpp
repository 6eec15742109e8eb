#pragma once

// Data-parallel inner loops of the Monte Carlo engine.
//
// Each kernel exists twice: `serial::` is the straightforward reference
// (row-at-a-time loops, Welford updates) and `parallel::` is the OpenMP
// version used in production.  The parallel kernels split rows into blocks
// of kBlockRows and combine per-block results in block order, so their
// output does not depend on the thread count.  Row generation is
// counter-based (see rng.hpp); generated data are bit-identical between the
// two variants, accumulated statistics agree to rounding.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/linear_scm.hpp"
#include "biaslab/moments.hpp"
#include "biaslab/rng.hpp"

namespace biaslab::kernels {

inline constexpr std::size_t kBlockRows = 4096;

enum class Disturbance { Gaussian, Uniform };

void set_thread_count(int threads);
int thread_count();

/// Linear SCM compiled to a flat evaluation plan.  Row layout = node ids.
/// Uniform disturbances are sqrt(12 psi) * Uniform(0, 1), so psi = 1/12
/// gives Uniform(0, 1) exactly.
class LinearRowGenerator {
public:
    LinearRowGenerator(const LinearSCM& model, Disturbance disturbance);

    std::size_t width() const noexcept { return width_; }

    bool operator()(rng::RowEngine& engine, double* row) const noexcept {
        for (const Step& s : steps_) {
            double v = 0.0;
            for (std::size_t i = s.first; i < s.last; ++i) v += coef_[i] * row[parent_[i]];
            const double noise =
                disturbance_ == Disturbance::Gaussian ? rng::standard_normal(engine) : rng::unit_uniform(engine);
            row[s.node] = v + s.scale * noise;
        }
        return true;
    }

private:
    struct Step {
        std::size_t node;
        std::size_t first;
        std::size_t last;
        double scale;
    };
    std::size_t width_ = 0;
    Disturbance disturbance_;
    std::vector<Step> steps_;
    std::vector<std::size_t> parent_;
    std::vector<double> coef_;
};

/// Nonlinear outcome model; row layout Z, U, X, Y.  Rows with
/// |X| < min_abs_x are rejected when g (or f) is a reciprocal.
class NonlinearRowGenerator {
public:
    static constexpr std::size_t kZ = 0, kU = 1, kX = 2, kY = 3;

    NonlinearRowGenerator(const bias::NonlinearOutcomeModel& model, double min_abs_x);

    std::size_t width() const noexcept { return 4; }

    bool operator()(rng::RowEngine& engine, double* row) const noexcept {
        const double z = rng::standard_normal(engine);
        const double u = rng::standard_normal(engine);
        const double x = c3_ * z + c1_ * u + sd_x_ * rng::standard_normal(engine);
        const double e = sd_y_ * rng::standard_normal(engine);
        if (reject_below_ > 0.0 && std::abs(x) < reject_below_) return false;
        row[kZ] = z;
        row[kU] = u;
        row[kX] = x;
        row[kY] = f_.value(x) + u * g_.value(x) + e;
        return true;
    }

private:
    double c3_, c1_, sd_x_, sd_y_, reject_below_;
    bias::FunctionSpec f_, g_;
};

/// Keep rows with lo <= row[column] <= hi.
struct RowFilter {
    bool active = false;
    std::size_t column = 0;
    double lo = 0.0;
    double hi = 0.0;

    bool keep(const double* row) const noexcept {
        return !active || (row[column] >= lo && row[column] <= hi);
    }
};

/// Axis-aligned box on up to two columns; accumulates `value_column`.
struct BinBox {
    std::size_t value_column = 0;
    std::size_t x_column = 0;
    double x_lo = 0.0, x_hi = 0.0;
    bool use_second = false;
    std::size_t z_column = 0;
    double z_lo = 0.0, z_hi = 0.0;

    bool contains(const double* row) const noexcept {
        if (row[x_column] < x_lo || row[x_column] > x_hi) return false;
        return !use_second || (row[z_column] >= z_lo && row[z_column] <= z_hi);
    }
};

struct BinSums {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) noexcept {
        ++count;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const BinSums& o) noexcept {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const noexcept { return count ? sum / static_cast<double>(count) : NAN; }
    /// Standard error of the mean.
    double standard_error() const noexcept {
        if (count < 2) return NAN;
        const double c = static_cast<double>(count);
        const double var = (sum_sq - sum * sum / c) / (c - 1.0);
        return std::sqrt(std::max(var, 0.0) / c);
    }
};

using Columns = std::vector<std::vector<double>>;

namespace detail {

inline void push_row(Columns& cols, const double* row) {
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(row[j]);
}

/// Two-pass moments of `count` rows stored row-major in `buf`.
inline Moments block_moments(const std::vector<double>& buf, std::size_t count, std::size_t width) {
    Moments m(width);
    m.n = count;
    if (count == 0) return m;
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> rows(buf.data(), static_cast<Eigen::Index>(count),
                                          static_cast<Eigen::Index>(width));
    m.mean = rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = rows.rowwise() - m.mean.transpose();
    m.comoment.noalias() = centered.transpose() * centered;
    return m;
}

inline std::size_t block_count(std::size_t rows) { return (rows + kBlockRows - 1) / kBlockRows; }

/// Raw sums of resampled rows of pre-centered columns.
inline Moments resample_moments(std::span<const std::span<const double>> centered, rng::Key key) {
    const std::size_t k = centered.size();
    const std::size_t n = centered.front().size();
    std::vector<double> s1(k, 0.0), s2(k * k, 0.0), row(k);
    for (std::size_t i = 0; i < n; i += 2) {
        const rng::Words w = rng::draw(key, i >> 1, 0);
        const std::uint64_t words[2] = {w.a, w.b};
        for (std::size_t t = 0; t < 2 && i + t < n; ++t) {
            const std::size_t r = rng::to_index(words[t], n);
            for (std::size_t j = 0; j < k; ++j) row[j] = centered[j][r];
            for (std::size_t j = 0; j < k; ++j) {
                s1[j] += row[j];
                for (std::size_t l = j; l < k; ++l) s2[j * k + l] += row[j] * row[l];
            }
        }
    }
    Moments m(k);
    m.n = n;
    const double dn = static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) m.mean(static_cast<Eigen::Index>(j)) = s1[j] / dn;
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = j; l < k; ++l) {
            const double c = s2[j * k + l] - s1[j] * s1[l] / dn;
            m.comoment(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = c;
            m.comoment(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = c;
        }
    return m;
}

/// Copies of the columns shifted by their means; returns the means.
inline std::vector<double> center_columns(std::span<const std::span<const double>> cols, Columns& out) {
    std::vector<double> means;
    out.clear();
    for (const auto& c : cols) {
        double s = 0.0;
        for (double v : c) s += v;
        const double m = c.empty() ? 0.0 : s / static_cast<double>(c.size());
        means.push_back(m);
        auto& dst = out.emplace_back(c.size());
        for (std::size_t r = 0; r < c.size(); ++r) dst[r] = c[r] - m;
    }
    return means;
}

}  // namespace detail

namespace serial {

/// Generates `rows` candidate rows; keeps those accepted by the generator
/// and the filter, in row order.
template <class Generator>
Columns generate(const Generator& gen, rng::Key key, std::size_t rows, RowFilter filter = {}) {
    Columns cols(gen.width());
    std::vector<double> row(gen.width());
    for (std::size_t r = 0; r < rows; ++r) {
        rng::RowEngine engine(key, r);
        if (gen(engine, row.data()) && filter.keep(row.data())) detail::push_row(cols, row.data());
    }
    return cols;
}

template <class Generator>
Moments stream_moments(const Generator& gen, rng::Key key, std::size_t rows, RowFilter filter = {}) {
    Moments m(gen.width());
    std::vector<double> row(gen.width());
    for (std::size_t r = 0; r < rows; ++r) {
        rng::RowEngine engine(key, r);
        if (gen(engine, row.data()) && filter.keep(row.data())) m.add(row);
    }
    return m;
}

template <class Generator>
std::vector<BinSums> stream_bins(const Generator& gen, rng::Key key, std::size_t rows, std::span<const BinBox> bins) {
    std::vector<BinSums> out(bins.size());
    std::vector<double> row(gen.width());
    for (std::size_t r = 0; r < rows; ++r) {
        rng::RowEngine engine(key, r);
        if (!gen(engine, row.data())) continue;
        for (std::size_t b = 0; b < bins.size(); ++b)
            if (bins[b].contains(row.data())) out[b].add(row[bins[b].value_column]);
    }
    return out;
}

/// Two-pass moments over whole columns.
inline Moments column_moments(std::span<const std::span<const double>> cols) {
    const std::size_t k = cols.size();
    Moments m(k);
    if (k == 0) return m;
    const std::size_t n = cols.front().size();
    m.n = n;
    if (n == 0) return m;
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (double v : cols[j]) s += v;
        m.mean(static_cast<Eigen::Index>(j)) = s / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = j; l < k; ++l) {
            const double mj = m.mean(static_cast<Eigen::Index>(j));
            const double ml = m.mean(static_cast<Eigen::Index>(l));
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += (cols[j][r] - mj) * (cols[l][r] - ml);
            m.comoment(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = s;
            m.comoment(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = s;
        }
    return m;
}

/// Moments of `resamples` paired bootstrap resamples (rows drawn with
/// replacement).  Resample b uses stream (seed, b).
inline std::vector<Moments> bootstrap_moments(std::span<const std::span<const double>> cols, std::uint64_t seed,
                                              std::size_t resamples) {
    Columns centered;
    const std::vector<double> shift = detail::center_columns(cols, centered);
    std::vector<std::span<const double>> views(centered.begin(), centered.end());
    std::vector<Moments> out;
    out.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        Moments m = detail::resample_moments(views, rng::stream_key(seed, b));
        for (std::size_t j = 0; j < shift.size(); ++j) m.mean(static_cast<Eigen::Index>(j)) += shift[j];
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace serial

namespace parallel {

template <class Generator>
Columns generate(const Generator& gen, rng::Key key, std::size_t rows, RowFilter filter = {}) {
    const std::size_t blocks = detail::block_count(rows);
    std::vector<Columns> parts(blocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) {
        Columns local(gen.width());
        std::vector<double> row(gen.width());
        const std::size_t end = std::min(rows, (b + 1) * kBlockRows);
        for (std::size_t r = b * kBlockRows; r < end; ++r) {
            rng::RowEngine engine(key, r);
            if (gen(engine, row.data()) && filter.keep(row.data())) detail::push_row(local, row.data());
        }
        parts[b] = std::move(local);
    }
    Columns cols(gen.width());
    std::size_t total = 0;
    for (const auto& p : parts) total += p.empty() ? 0 : p.front().size();
    for (auto& c : cols) c.reserve(total);
    for (const auto& p : parts)
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j].insert(cols[j].end(), p[j].begin(), p[j].end());
    return cols;
}

template <class Generator>
Moments stream_moments(const Generator& gen, rng::Key key, std::size_t rows, RowFilter filter = {}) {
    const std::size_t width = gen.width();
    const std::size_t blocks = detail::block_count(rows);
    std::vector<Moments> parts(blocks);
#pragma omp parallel
    {
        std::vector<double> buf(kBlockRows * width);
#pragma omp for schedule(static)
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t kept = 0;
            const std::size_t end = std::min(rows, (b + 1) * kBlockRows);
            for (std::size_t r = b * kBlockRows; r < end; ++r) {
                rng::RowEngine engine(key, r);
                double* row = buf.data() + kept * width;
                if (gen(engine, row) && filter.keep(row)) ++kept;
            }
            parts[b] = detail::block_moments(buf, kept, width);
        }
    }
    Moments total(width);
    for (const auto& p : parts) total.merge(p);
    return total;
}

template <class Generator>
std::vector<BinSums> stream_bins(const Generator& gen, rng::Key key, std::size_t rows, std::span<const BinBox> bins) {
    const std::size_t blocks = detail::block_count(rows);
    std::vector<std::vector<BinSums>> parts(blocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<BinSums> local(bins.size());
        std::vector<double> row(gen.width());
        const std::size_t end = std::min(rows, (b + 1) * kBlockRows);
        for (std::size_t r = b * kBlockRows; r < end; ++r) {
            rng::RowEngine engine(key, r);
            if (!gen(engine, row.data())) continue;
            for (std::size_t i = 0; i < bins.size(); ++i)
                if (bins[i].contains(row.data())) local[i].add(row[bins[i].value_column]);
        }
        parts[b] = std::move(local);
    }
    std::vector<BinSums> out(bins.size());
    for (const auto& p : parts)
        for (std::size_t i = 0; i < bins.size(); ++i) out[i].merge(p[i]);
    return out;
}

inline Moments column_moments(std::span<const std::span<const double>> cols) {
    const std::size_t k = cols.size();
    if (k == 0) return Moments(0);
    const std::size_t n = cols.front().size();
    const std::size_t blocks = detail::block_count(n);
    std::vector<Moments> parts(blocks);
#pragma omp parallel
    {
        std::vector<double> buf(kBlockRows * k);
#pragma omp for schedule(static)
        for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t begin = b * kBlockRows;
            const std::size_t end = std::min(n, begin + kBlockRows);
            for (std::size_t r = begin; r < end; ++r)
                for (std::size_t j = 0; j < k; ++j) buf[(r - begin) * k + j] = cols[j][r];
            parts[b] = detail::block_moments(buf, end - begin, k);
        }
    }
    Moments total(k);
    for (const auto& p : parts) total.merge(p);
    return total;
}

inline std::vector<Moments> bootstrap_moments(std::span<const std::span<const double>> cols, std::uint64_t seed,
                                              std::size_t resamples) {
    Columns centered;
    const std::vector<double> shift = detail::center_columns(cols, centered);
    std::vector<std::span<const double>> views(centered.begin(), centered.end());
    std::vector<Moments> out(resamples);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t b = 0; b < resamples; ++b) {
        Moments m = detail::resample_moments(views, rng::stream_key(seed, b));
        for (std::size_t j = 0; j < shift.size(); ++j) m.mean(static_cast<Eigen::Index>(j)) += shift[j];
        out[b] = std::move(m);
    }
    return out;
}

}  // namespace parallel
}  // namespace biaslab::kernels
