#include "abimca/cluster_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "abimca/simd/kernels.hpp"

namespace abimca {
namespace {

// Clusters are indexed in order of first occurrence so every reduction over
// clusters runs in an order that does not depend on the label values.
struct DenseLabels {
    std::vector<std::size_t> index;
    std::vector<Label> ids;
    std::vector<std::size_t> counts;

    std::size_t k() const noexcept { return ids.size(); }
};

DenseLabels densify(std::span<const Label> labels) {
    DenseLabels out;
    out.index.reserve(labels.size());
    std::unordered_map<Label, std::size_t> seen;
    for (Label l : labels) {
        auto [it, fresh] = seen.emplace(l, out.ids.size());
        if (fresh) {
            out.ids.push_back(l);
            out.counts.push_back(0);
        }
        out.index.push_back(it->second);
        ++out.counts[it->second];
    }
    return out;
}

void check_points(const Matrix& points, std::span<const Label> labels, const char* name) {
    if (points.rows() != labels.size()) {
        throw std::invalid_argument(std::string(name) + ": point count does not match label count");
    }
}

double sample_std(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double median_of(std::vector<double> x) {
    const std::size_t n = x.size();
    const auto mid = x.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(x.begin(), mid, x.end());
    const double hi = *mid;
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(x.begin(), mid);
    return 0.5 * (lo + hi);
}

Matrix centroids_of(const Matrix& points, const DenseLabels& dl) {
    const std::size_t p = points.cols();
    Matrix c(dl.k(), p, 0.0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto row = c.row(dl.index[i]);
        const auto x = points.row(i);
        for (std::size_t f = 0; f < p; ++f) row[f] += x[f];
    }
    for (std::size_t g = 0; g < dl.k(); ++g) {
        for (double& v : c.row(g)) v /= static_cast<double>(dl.counts[g]);
    }
    return c;
}

struct ClusterCc {
    std::vector<Label> ids;
    std::vector<double> cc;
    std::vector<std::size_t> counts;
};

ClusterCc consistency_ordered(const CurveParams& params, std::span<const Label> labels, bool include_zero) {
    if (labels.size() != params.size()) {
        throw std::invalid_argument("cluster_curvature_consistency: label count does not match series length");
    }
    std::vector<Label> kept;
    std::vector<std::size_t> at;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (include_zero || labels[t] != 0) {
            kept.push_back(labels[t]);
            at.push_back(t);
        }
    }
    const DenseLabels dl = densify(kept);
    std::vector<std::vector<std::size_t>> members(dl.k());
    for (std::size_t i = 0; i < kept.size(); ++i) members[dl.index[i]].push_back(at[i]);

    ClusterCc out{dl.ids, std::vector<double>(dl.k()), dl.counts};
    std::vector<double> buf;
    auto std_over = [&](const std::vector<double>& v, const std::vector<std::size_t>& idx) {
        buf.clear();
        for (std::size_t t : idx) buf.push_back(v[t]);
        return sample_std(buf);
    };
    for (std::size_t g = 0; g < dl.k(); ++g) {
        if (dl.counts[g] < 2) {
            out.cc[g] = 0.0;
            continue;
        }
        const double sigma = (std_over(params.kappa, members[g]) + std_over(params.tau, members[g]) +
                              std_over(params.accel, members[g])) /
                             3.0;
        out.cc[g] = std::max(-1.0, 1.0 - sigma);
    }
    return out;
}

double weighted_ordered(std::span<const double> cc, std::span<const std::size_t> counts) {
    if (cc.empty()) throw std::invalid_argument("weighted_cc: no clusters");
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < cc.size(); ++g) {
        num += cc[g] * static_cast<double>(counts[g]);
        den += static_cast<double>(counts[g]);
    }
    return num / den;
}

}  // namespace

std::map<Label, double> cluster_curvature_consistency(const CurveParams& params, std::span<const Label> labels) {
    const ClusterCc c = consistency_ordered(params, labels, true);
    std::map<Label, double> out;
    for (std::size_t g = 0; g < c.ids.size(); ++g) out[c.ids[g]] = c.cc[g];
    return out;
}

double weighted_cc(const std::map<Label, double>& cc, const std::map<Label, std::size_t>& counts) {
    if (cc.empty()) throw std::invalid_argument("weighted_cc: no clusters");
    if (cc.size() != counts.size()) throw std::invalid_argument("weighted_cc: key sets differ");
    std::vector<double> v;
    std::vector<std::size_t> n;
    for (const auto& [id, value] : cc) {
        const auto it = counts.find(id);
        if (it == counts.end()) throw std::invalid_argument("weighted_cc: key sets differ");
        v.push_back(value);
        n.push_back(it->second);
    }
    return weighted_ordered(v, n);
}

double silhouette(const Matrix& points, std::span<const Label> labels) {
    check_points(points, labels, "silhouette");
    const std::size_t m = points.rows(), p = points.cols();
    const DenseLabels dl = densify(labels);
    if (dl.k() < 2 || m < 2) return 0.0;

    const Matrix soa = points.transposed();
    const auto& kern = simd::active();
    std::vector<double> dist(m), sums(dl.k());
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t own = dl.index[i];
        if (dl.counts[own] == 1) continue;
        kern.squared_distances_soa(points.row(i).data(), p, soa.data(), m, m, dist.data());
        kern.sqrt_inplace(dist.data(), m);
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j) sums[dl.index[j]] += dist[j];
        const double a = sums[own] / static_cast<double>(dl.counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < dl.k(); ++g) {
            if (g != own) b = std::min(b, sums[g] / static_cast<double>(dl.counts[g]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(m);
}

double calinski_harabasz(const Matrix& points, std::span<const Label> labels) {
    check_points(points, labels, "calinski_harabasz");
    const DenseLabels dl = densify(labels);
    const std::size_t m = points.rows(), k = dl.k();
    if (k < 2) throw std::invalid_argument("calinski_harabasz: need at least 2 clusters");
    if (m <= k) throw std::invalid_argument("calinski_harabasz: need more points than clusters");

    const Matrix c = centroids_of(points, dl);
    std::vector<double> grand(points.cols(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t f = 0; f < points.cols(); ++f) grand[f] += points(i, f);
    }
    for (double& g : grand) g /= static_cast<double>(m);

    double between = 0.0, within = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        between += static_cast<double>(dl.counts[g]) * simd::squared_distance(c.row(g), grand);
    }
    for (std::size_t i = 0; i < m; ++i) within += simd::squared_distance(points.row(i), c.row(dl.index[i]));
    if (within == 0.0) return 1.0;
    return between * static_cast<double>(m - k) / (within * static_cast<double>(k - 1));
}

double davies_bouldin(const Matrix& points, std::span<const Label> labels) {
    check_points(points, labels, "davies_bouldin");
    const DenseLabels dl = densify(labels);
    const std::size_t k = dl.k();
    if (k < 2) throw std::invalid_argument("davies_bouldin: need at least 2 clusters");

    const Matrix c = centroids_of(points, dl);
    std::vector<double> scatter(k, 0.0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        scatter[dl.index[i]] += std::sqrt(simd::squared_distance(points.row(i), c.row(dl.index[i])));
    }
    for (std::size_t g = 0; g < k; ++g) scatter[g] /= static_cast<double>(dl.counts[g]);

    double total = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        double worst = 0.0;
        for (std::size_t h = 0; h < k; ++h) {
            if (h == g) continue;
            const double d = std::sqrt(simd::squared_distance(c.row(g), c.row(h)));
            if (d > 0.0) worst = std::max(worst, (scatter[g] + scatter[h]) / d);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

std::vector<SubseqFeatures> subsequence_features(const TimeSeries& series, const CurveParams& params,
                                                 std::span<const Label> labels) {
    if (labels.size() != series.length() || params.size() != series.length()) {
        throw std::invalid_argument("subsequence_features: inconsistent lengths");
    }
    std::vector<SubseqFeatures> out;
    std::unordered_map<Label, std::size_t> per_cluster;
    for (const Subsequence& s : segment_labels(labels)) {
        SubseqFeatures f;
        f.cluster_id = s.cluster_id;
        f.subseq_index = per_cluster[s.cluster_id]++;
        f.start = s.start;
        f.count = s.length;
        auto slice = [&](const std::vector<double>& v) {
            return std::span<const double>(v).subspan(s.start, s.length);
        };
        f.mean_kappa = mean_of(slice(params.kappa));
        f.mean_tau = mean_of(slice(params.tau));
        f.mean_accel = mean_of(slice(params.accel));
        f.sigma = (sample_std(slice(params.kappa)) + sample_std(slice(params.tau)) +
                   sample_std(slice(params.accel))) /
                  3.0;
        for (std::size_t d = 0; d < series.dims(); ++d) {
            const auto x = series.feature(d).subspan(s.start, s.length);
            f.medians.push_back(median_of({x.begin(), x.end()}));
        }
        out.push_back(std::move(f));
    }
    return out;
}

Matrix sp_matrix(std::span<const SubseqFeatures> features) {
    Matrix out(features.size(), 5);
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& f = features[j];
        const double row[] = {f.mean_kappa, f.mean_tau, f.mean_accel, f.sigma, static_cast<double>(f.count)};
        std::copy(std::begin(row), std::end(row), out.row(j).begin());
    }
    return out;
}

Matrix sl_matrix(std::span<const SubseqFeatures> features) {
    const std::size_t d = features.empty() ? 0 : features.front().medians.size();
    Matrix out(features.size(), d + 2);
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& f = features[j];
        auto row = out.row(j);
        std::copy(f.medians.begin(), f.medians.end(), row.begin());
        row[d] = f.sigma;
        row[d + 1] = static_cast<double>(f.count);
    }
    return out;
}

MetricReport mt3scm(const TimeSeries& series, std::span<const Label> labels, const MetricOptions& options) {
    if (labels.size() != series.length()) throw std::invalid_argument("mt3scm: label count does not match series");
    return mt3scm(series, curve_params(series), labels, options);
}

MetricReport mt3scm(const TimeSeries& series, const CurveParams& params, std::span<const Label> labels,
                    const MetricOptions& options) {
    if (labels.size() != series.length() || params.size() != series.length()) {
        throw std::invalid_argument("mt3scm: inconsistent lengths");
    }
    MetricReport rep;
    const ClusterCc cc = consistency_ordered(params, labels, options.include_label_zero);
    rep.n_clusters = cc.ids.size();
    if (rep.n_clusters == 0) {
        rep.degenerate = true;
        return rep;
    }
    for (std::size_t g = 0; g < cc.ids.size(); ++g) {
        rep.cc_per_cluster[cc.ids[g]] = cc.cc[g];
        rep.cluster_sizes[cc.ids[g]] = cc.counts[g];
    }
    rep.wcc = weighted_ordered(cc.cc, cc.counts);

    std::vector<SubseqFeatures> feats = subsequence_features(series, params, labels);
    if (!options.include_label_zero) {
        std::erase_if(feats, [](const SubseqFeatures& f) { return f.cluster_id == 0; });
    }
    rep.n_subsequences = feats.size();
    rep.degenerate = rep.n_clusters < 2;
    if (!rep.degenerate) {
        std::vector<Label> sub_labels;
        for (const auto& f : feats) sub_labels.push_back(f.cluster_id);
        rep.sp = silhouette(sp_matrix(feats), sub_labels);
        rep.sl = silhouette(sl_matrix(feats), sub_labels);

        std::vector<std::size_t> keep;
        for (std::size_t t = 0; t < labels.size(); ++t) {
            if (options.include_label_zero || labels[t] != 0) keep.push_back(t);
        }
        Matrix pts(keep.size(), series.dims());
        std::vector<Label> pl(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            for (std::size_t f = 0; f < series.dims(); ++f) pts(i, f) = series(f, keep[i]);
            pl[i] = labels[keep[i]];
        }
        rep.silhouette = silhouette(pts, pl);
        if (keep.size() > rep.n_clusters) rep.calinski_harabasz = calinski_harabasz(pts, pl);
        rep.davies_bouldin = davies_bouldin(pts, pl);
    }
    rep.mt3scm = (rep.wcc + rep.sl + rep.sp) / 3.0;
    return rep;
}

}  // namespace abimca
