#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mixclust/bench.hpp"
#include "mixclust/errors.hpp"

namespace mixclust {

namespace {

using json = nlohmann::json;

std::string opt_str(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string("nan");
}

json opt_json(const std::optional<double>& x) {
    return x ? json(*x) : json(nullptr);
}

json finite_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

struct Series {
    std::string label;
    std::string color;
    std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::string& y_label,
                       const std::vector<double>& xs, const std::vector<Series>& series) {
    const double w = 640, h = 400, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;

    double ymax = 0.0;
    for (const auto& s : series) {
        for (double y : s.y) {
            if (std::isfinite(y)) ymax = std::max(ymax, y);
        }
    }
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;
    const double lx0 = std::log10(xs.front());
    const double lx1 = xs.size() > 1 ? std::log10(xs.back()) : lx0 + 1.0;
    auto px = [&](double x) {
        return left + (xs.size() > 1 ? (std::log10(x) - lx0) / (lx1 - lx0) : 0.5) * pw;
    };
    auto py = [&](double y) { return top + ph - y / ymax * ph; };

    std::ostringstream o;
    char buf[256];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  left, top, left, top + ph, left, top + ph, left + pw, top + ph);
    o << buf;
    for (int i = 0; i <= 4; ++i) {
        const double y = ymax * i / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n", left - 6,
                      py(y) + 4, y);
        o << buf;
    }
    for (double x : xs) {
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%g</text>\n",
                      px(x), top + ph + 18, x);
        o << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">N</text>\n",
                  left + pw / 2, h - 10);
    o << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%g\" transform=\"rotate(-90 16 %g)\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  top + ph / 2, top + ph / 2, y_label.c_str());
    o << buf;

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        o << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(ser.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%g,%g ", px(xs[i]), py(ser.y[i]));
            o << buf;
        }
        o << "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(s);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%g\" y=\"%g\">%s</text>\n",
                      left + pw + 12, ly, left + pw + 32, ly, ser.color.c_str(), left + pw + 38,
                      ly + 4, ser.label.c_str());
        o << buf;
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<const CellSummary*> cells_of(const SweepResult& result, const std::string& case_name) {
    std::vector<const CellSummary*> cells;
    for (const auto& c : result.summary) {
        if (c.case_name == case_name) cells.push_back(&c);
    }
    if (cells.empty()) throw ValidationError("no summary cells for case " + case_name);
    return cells;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> csv_header(const ExperimentConfig& cfg) {
    std::vector<std::string> h{"N",         "F",        "K",           "case",
                               "trial_seed", "d_org",   "dbar_org",    "dbar_org_emp",
                               "d_pca",     "dbar_pca", "dbar_pca_emp"};
    for (const auto& r : cfg.reducers) {
        h.push_back("me_" + r.name());
        h.push_back("gamma_" + r.name());
    }
    for (const char* c : {"t_full_ms", "t_reduce_ms", "t_reduced_kmeans_ms", "dbar_org_applicable",
                          "dbar_org_emp_applicable", "dbar_pca_applicable",
                          "dbar_pca_emp_applicable"}) {
        h.emplace_back(c);
    }
    return h;
}

std::string csv_row(const TrialRecord& r) {
    std::vector<std::string> f{std::to_string(r.n),
                               std::to_string(r.f),
                               std::to_string(r.k),
                               r.case_name,
                               std::to_string(r.trial_seed),
                               format_double(r.d_org),
                               opt_str(r.dbar_org),
                               opt_str(r.dbar_org_emp),
                               format_double(r.d_pca),
                               opt_str(r.dbar_pca),
                               opt_str(r.dbar_pca_emp)};
    for (const auto& o : r.reducers) {
        f.push_back(format_double(o.me));
        f.push_back(format_double(o.gamma));
    }
    f.push_back(format_double(r.t_full_ms));
    f.push_back(format_double(r.t_reduce_ms));
    f.push_back(format_double(r.t_reduced_kmeans_ms));
    for (bool b : {r.dbar_org_applicable, r.dbar_org_emp_applicable, r.dbar_pca_applicable,
                   r.dbar_pca_emp_applicable}) {
        f.emplace_back(b ? "1" : "0");
    }
    std::string line;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) line += ',';
        line += f[i];
    }
    return line;
}

std::string to_csv(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
    std::string out;
    const auto header = csv_header(cfg);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& r : records) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

json to_json(const TrialRecord& r) {
    json j{{"N", r.n},
           {"F", r.f},
           {"K", r.k},
           {"case", r.case_name},
           {"trial_seed", r.trial_seed},
           {"d_org", r.d_org},
           {"dbar_org", opt_json(r.dbar_org)},
           {"dbar_org_emp", opt_json(r.dbar_org_emp)},
           {"d_pca", r.d_pca},
           {"dbar_pca", opt_json(r.dbar_pca)},
           {"dbar_pca_emp", opt_json(r.dbar_pca_emp)}};
    json red = json::object();
    for (const auto& o : r.reducers) red[o.name] = {{"me", o.me}, {"gamma", finite_or_null(o.gamma)}};
    j["reducers"] = red;
    j["t_full_ms"] = r.t_full_ms;
    j["t_reduce_ms"] = r.t_reduce_ms;
    j["t_reduced_kmeans_ms"] = r.t_reduced_kmeans_ms;
    j["dbar_org_applicable"] = r.dbar_org_applicable;
    j["dbar_org_emp_applicable"] = r.dbar_org_emp_applicable;
    j["dbar_pca_applicable"] = r.dbar_pca_applicable;
    j["dbar_pca_emp_applicable"] = r.dbar_pca_emp_applicable;
    return j;
}

json summary_json(const ExperimentConfig& cfg, const SweepResult& result) {
    json cells = json::array();
    for (const auto& c : result.summary) {
        cells.push_back({{"case", c.case_name},
                         {"N", c.n},
                         {"trials", c.trials},
                         {"d_org", finite_or_null(c.d_org)},
                         {"dbar_org", finite_or_null(c.dbar_org)},
                         {"dbar_org_emp", finite_or_null(c.dbar_org_emp)},
                         {"d_pca", finite_or_null(c.d_pca)},
                         {"dbar_pca", finite_or_null(c.dbar_pca)},
                         {"dbar_pca_emp", finite_or_null(c.dbar_pca_emp)},
                         {"t_full_ms", finite_or_null(c.t_full_ms)},
                         {"t_reduce_ms", finite_or_null(c.t_reduce_ms)},
                         {"t_reduced_kmeans_ms", finite_or_null(c.t_reduced_kmeans_ms)}});
    }
    return {{"config", config_to_json(cfg)}, {"cells", cells}};
}

std::string distance_svg(const SweepResult& result, const std::string& case_name) {
    const auto cells = cells_of(result, case_name);
    std::vector<double> xs;
    std::vector<Series> s{{"d_org", "#1f77b4", {}},       {"dbar_org", "#1f77b4", {}},
                          {"dbar_org_emp", "#aec7e8", {}}, {"d_pca", "#d62728", {}},
                          {"dbar_pca", "#d62728", {}},     {"dbar_pca_emp", "#ff9896", {}}};
    for (const auto* c : cells) {
        xs.push_back(static_cast<double>(c->n));
        s[0].y.push_back(c->d_org);
        s[1].y.push_back(c->dbar_org);
        s[2].y.push_back(c->dbar_org_emp);
        s[3].y.push_back(c->d_pca);
        s[4].y.push_back(c->dbar_pca);
        s[5].y.push_back(c->dbar_pca_emp);
    }
    return line_chart("Distances (" + case_name + ")", "ME distance", xs, s);
}

std::string runtime_svg(const SweepResult& result, const std::string& case_name) {
    const auto cells = cells_of(result, case_name);
    std::vector<double> xs;
    std::vector<Series> s{{"k-means on V", "#1f77b4", {}}, {"PCA + k-means", "#d62728", {}}};
    for (const auto* c : cells) {
        xs.push_back(static_cast<double>(c->n));
        s[0].y.push_back(c->t_full_ms);
        s[1].y.push_back(c->t_reduce_ms + c->t_reduced_kmeans_ms);
    }
    return line_chart("Runtime (" + case_name + ")", "milliseconds", xs, s);
}

void write_sweep(const ExperimentConfig& cfg, const SweepResult& result, bool as_json, bool plots) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output.string() + ": " + ec.message());
    if (as_json) {
        json rows = json::array();
        for (const auto& r : result.records) rows.push_back(to_json(r));
        write_text(cfg.output / "trials.json", rows.dump(2) + "\n");
    } else {
        write_text(cfg.output / "trials.csv", to_csv(cfg, result.records));
    }
    write_text(cfg.output / "summary.json", summary_json(cfg, result).dump(2) + "\n");
    if (plots) {
        for (const auto& c : cfg.cases) {
            write_text(cfg.output / ("distances_" + c.name() + ".svg"), distance_svg(result, c.name()));
            write_text(cfg.output / ("runtime_" + c.name() + ".svg"), runtime_svg(result, c.name()));
        }
    }
}

}  // namespace mixclust
