#pragma once

#include "skdv/spectral.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace skdv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class NormKind { Besov, FourierLebesgue, Xsb, Xsbpq };

const char* to_string(NormKind kind);

// Selects one norm family and its exponents. p, q may be infinite; restriction is the window [0, T].
struct NormSpec {
    NormKind kind = NormKind::Besov;
    double s = 0;
    std::optional<double> b;
    double p = 2;
    double q = kInfinity;
    std::optional<double> T;

    static NormSpec besov(double s, double p, double q = kInfinity);
    static NormSpec fourier_lebesgue(double s, double p);
    static NormSpec sobolev(double s) { return fourier_lebesgue(s, 2); }
    static NormSpec xsb(double s, double b);
    static NormSpec xsbpq(double s, double b, double p, double q = 2);
    NormSpec restricted(double T) const;

    // Throws std::invalid_argument on p, q < 1, T <= 0, or a temporal kind without b.
    void validate() const;
    bool temporal() const { return kind == NormKind::Xsb || kind == NormKind::Xsbpq; }
};

// B_0 = {|n| <= 1}, B_j = {2^{j-1} < |n| <= 2^j}.
class DyadicPartition {
public:
    explicit DyadicPartition(int n_max);

    static int block_of(int n);
    int size() const noexcept { return static_cast<int>(blocks_.size()); }
    const std::vector<int>& block(int j) const { return blocks_.at(j); }

private:
    std::vector<std::vector<int>> blocks_;
};

// Dyadic l^q over blocks of the weighted l^p block sums of a(n), n = -N..N stored at n + N.
double dyadic_sequence_norm(const Eigen::VectorXd& a, double s, double p, double q);

// Weighted l^p over all modes of a(n), n = -N..N stored at n + N.
double weighted_sequence_norm(const Eigen::VectorXd& a, double s, double p);

double besov_norm(const SpectralField& u, const NormSpec& spec);
double sobolev_fl_norm(const SpectralField& u, const NormSpec& spec);
double xsb_norm(const SpaceTimeField& u, const NormSpec& spec);
double xsbpq_norm(const SpaceTimeField& u, const NormSpec& spec);

// Per-mode temporal norms ||<tau - n^3>^b u^(n, .)||_{L^q_tau}, n = -N..N.
Eigen::VectorXd modulation_profile(const SpaceTimeField& u, double b, double q);

struct RestrictedNorm {
    double value = 0;
    bool surrogate = false;  // true when the smooth cutoff eta_T stands in for the restriction infimum
};

// b < 1/2: norm of chi_[0,T] u. b >= 1/2: norm of eta(t/T) u, flagged as surrogate.
// Samples outside the field's window count as zero; the cut field is embedded in a window
// at least four times the cutoff support before transforming.
RestrictedNorm restricted_norm(const SpaceTimeField& u, const NormSpec& spec);

// The cutoff field chi_[0,T] u or eta_T u on its padded window.
SpaceTimeField restricted_field(const SpaceTimeField& u, const NormSpec& spec);

// Dispatch on spec.kind; temporal specs with a restriction go through restricted_norm.
double norm(const SpectralField& u, const NormSpec& spec);
double norm(const SpaceTimeField& u, const NormSpec& spec);

// C with ||f||_{FL^{s-eps,p}} <= C ||f||_{hb^s_{p,inf}} on the grid: (sum_j min_{B_j} <n>^{-eps p})^{1/p}.
double fl_embedding_constant(double eps, double p, int n_max);

// C with ||f||_{H^{-1/2-delta}} <= C ||f||_{hb^{-1/2+delta}_{p,inf}} by Hoelder on each block;
// the same constant bounds X^{-1/2-delta,b} by X^{-1/2+delta,b}_{p,2}.
double hoelder_embedding_constant(double delta, double p, int n_max);

}  // namespace skdv
