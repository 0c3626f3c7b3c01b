#pragma once

// Large-homogeneous-portfolio formulas under the one-factor Gaussian copula.
// Notional is 1; losses are fractions of it.
namespace corrsurf::gauss {

struct TrancheSpec {
    double k_down;
    double k_up;
};

enum class Compounding {
    continuous, // p = 1 - exp(-h t)
    discrete,   // p = 1 - (1 - h)^t
};

// (loss - Kd)+ - (loss - Ku)+
double tranche_payoff(double loss, const TrancheSpec& tr);
double equity_payoff(double loss, double K);

double vasicek_d1(double K, double p, double recovery, double rho);
double vasicek_loss_cdf(double l, double p, double recovery, double rho);

// E L_(0,K]. For K >= 1 - recovery the whole loss is absorbed: (1 - R) p.
double expected_equity_loss_gauss(double K, double p, double recovery, double rho);
double expected_tranche_loss_gauss(const TrancheSpec& tr, double p, double recovery, double rho);

double d_expected_loss_d_rho(double K, double p, double recovery, double rho);
double d_expected_loss_d_K(double K, double p, double recovery, double rho);
double d_expected_loss_d_p(double K, double p, double recovery, double rho);
// Chain rule through p_t(h); p_t must be consistent with (h, t, conv).
double d_expected_loss_d_h(double K, double p_t, double recovery, double rho, double t, double h,
                           Compounding conv = Compounding::continuous);

// Lower (rho -> 1) and upper (rho -> 0) limits of E L_(0,K].
double equity_loss_lower_bound(double K, double p, double recovery);
double equity_loss_upper_bound(double K, double p, double recovery);

double loss_variance(double p, double recovery, double rho_d);
double gaussian_default_corr(double p, double rho);

double hazard_to_p(double h, double t, Compounding conv = Compounding::continuous);
double dp_dh(double h, double t, Compounding conv = Compounding::continuous);

} // namespace corrsurf::gauss
