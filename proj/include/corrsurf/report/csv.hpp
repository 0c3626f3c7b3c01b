#pragma once

#include "corrsurf/estimation.hpp"
#include "corrsurf/factor_mc.hpp"
#include "corrsurf/surface.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

// Long-form CSV emission. Numbers use %.12g so output is byte-stable for a
// given seed; fields containing commas or quotes are quoted.
namespace corrsurf::report {

std::string format_number(double v);
std::string escape_field(const std::string& s);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);

    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::size_t v);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

// path,step,return
void write_paths(std::ostream& out, const tarch::PathMatrix& paths);

// model,parameter,value,std_error,loglik,converged,n_obs
void write_fit(std::ostream& out, std::span<const est::FitResult> fits);

struct MomentRow {
    std::size_t steps;
    double v_t;
    double s_t;
    double s_t_low;
    double s_t_high;
    double k_t;
};
// steps,V_T,S_T,S_T_low,S_T_high,K_T
void write_moments(std::ostream& out, std::span<const MomentRow> rows);

// model,horizon_steps,p,rho_d,lower,upper
void write_default_corr(std::ostream& out, const std::string& model, std::size_t horizon_steps,
                        std::span<const factor::DefaultCorrPoint> pts);

// model,T,K,p,hazard,rho,flag
void write_surface(std::ostream& out, const surface::CorrSurface& s);

// model,K,T,hazard,rho,psi,rho_h,delta_adj,gaussian_delta
void write_deltas(std::ostream& out, const std::string& model, std::span<const surface::DeltaReport> rows);

} // namespace corrsurf::report
