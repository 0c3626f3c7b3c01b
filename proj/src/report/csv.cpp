#include "corrsurf/report/csv.hpp"

#include "corrsurf/errors.hpp"

#include <cmath>
#include <cstdio>

namespace corrsurf::report {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string escape_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size())
{
    for (const auto& h : header)
        cell(h);
    end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s)
{
    if (in_row_ > 0)
        out_ << ',';
    out_ << escape_field(s);
    ++in_row_;
    return *this;
}

CsvWriter& CsvWriter::cell(double v)
{
    return cell(format_number(v));
}

CsvWriter& CsvWriter::cell(std::size_t v)
{
    return cell(std::to_string(v));
}

void CsvWriter::end_row()
{
    if (in_row_ != columns_)
        throw LengthMismatchError("csv row has " + std::to_string(in_row_) + " cells, header has " +
                                  std::to_string(columns_));
    out_ << '\n';
    in_row_ = 0;
}

void write_paths(std::ostream& out, const tarch::PathMatrix& paths)
{
    CsvWriter w(out, {"path", "step", "return"});
    for (std::size_t i = 0; i < paths.n_paths; ++i)
        for (std::size_t t = 0; t < paths.cols; ++t) {
            w.cell(i).cell(t + 1).cell(paths(i, t));
            w.end_row();
        }
}

void write_fit(std::ostream& out, std::span<const est::FitResult> fits)
{
    CsvWriter w(out, {"model", "parameter", "value", "std_error", "loglik", "converged", "n_obs"});
    for (const auto& f : fits)
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            w.cell(est::model_name(f.model)).cell(f.names[i]).cell(f.values[i]).cell(f.std_errors[i]);
            w.cell(f.loglik).cell(std::string(f.converged ? "true" : "false")).cell(f.n_obs);
            w.end_row();
        }
}

void write_moments(std::ostream& out, std::span<const MomentRow> rows)
{
    CsvWriter w(out, {"steps", "V_T", "S_T", "S_T_low", "S_T_high", "K_T"});
    for (const auto& r : rows) {
        w.cell(r.steps).cell(r.v_t).cell(r.s_t).cell(r.s_t_low).cell(r.s_t_high).cell(r.k_t);
        w.end_row();
    }
}

void write_default_corr(std::ostream& out, const std::string& model, std::size_t horizon_steps,
                        std::span<const factor::DefaultCorrPoint> pts)
{
    CsvWriter w(out, {"model", "horizon_steps", "p", "rho_d", "lower", "upper"});
    for (const auto& pt : pts) {
        w.cell(model).cell(horizon_steps).cell(pt.p).cell(pt.estimate).cell(pt.lower).cell(pt.upper);
        w.end_row();
    }
}

void write_surface(std::ostream& out, const surface::CorrSurface& s)
{
    CsvWriter w(out, {"model", "T", "K", "p", "hazard", "rho", "flag"});
    for (std::size_t it = 0; it < s.t_grid.size(); ++it)
        for (std::size_t ik = 0; ik < s.k_grid.size(); ++ik) {
            w.cell(s.model_id).cell(s.t_grid[it]).cell(s.k_grid[ik]).cell(s.p[it]).cell(s.hazard);
            w.cell(s.at(ik, it)).cell(std::string(surface::flag_name(s.flags[s.index(ik, it)])));
            w.end_row();
        }
}

void write_deltas(std::ostream& out, const std::string& model, std::span<const surface::DeltaReport> rows)
{
    CsvWriter w(out, {"model", "K", "T", "hazard", "rho", "psi", "rho_h", "delta_adj", "gaussian_delta"});
    for (const auto& r : rows) {
        w.cell(model).cell(r.K).cell(r.t).cell(r.hazard).cell(r.rho).cell(r.psi).cell(r.rho_h);
        w.cell(r.delta_adj).cell(r.gaussian_delta_proxy);
        w.end_row();
    }
}

} // namespace corrsurf::report
