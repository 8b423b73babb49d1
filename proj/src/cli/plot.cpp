#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lpplab/cli.hpp"
#include "lpplab/experiments.hpp"
#include "lpplab/measures.hpp"

namespace lpplab::cli {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cells.back() += '"', ++i;
            else if (ch == '"') quoted = false;
            else cells.back() += ch;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.emplace_back();
        } else if (ch != '\r') {
            cells.back() += ch;
        }
    }
    return cells;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::ptrdiff_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    }
    std::vector<double> numbers(std::ptrdiff_t col) const {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(std::stod(r.at(std::size_t(col))));
        return out;
    }
};

Csv read_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    Csv csv;
    std::string line;
    if (std::getline(in, line)) csv.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        csv.rows.push_back(split_csv_line(line));
    }
    return csv;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Empirical pmf of integer data as bar series.
PlotSeries pmf_series(const std::string& label, const std::vector<double>& values) {
    std::map<double, double> counts;
    for (double v : values) counts[v] += 1.0;
    PlotSeries s{label, PlotSeries::Kind::bars, {}, {}};
    for (const auto& [x, cnt] : counts) {
        s.x.push_back(x);
        s.y.push_back(cnt / double(values.size()));
    }
    return s;
}

// Equal-width histogram (density) of real data.
PlotSeries histogram_series(const std::string& label, const std::vector<double>& values, int bins) {
    PlotSeries s{label, PlotSeries::Kind::bars, {}, {}};
    if (values.empty()) return s;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1.0;
    const double w = (hi - lo) / bins;
    std::vector<double> counts(std::size_t(bins), 0.0);
    for (double v : values) counts[std::size_t(std::min(bins - 1, int((v - lo) / w)))] += 1.0;
    for (int b = 0; b < bins; ++b) {
        s.x.push_back(lo + (b + 0.5) * w);
        s.y.push_back(counts[std::size_t(b)] / (double(values.size()) * w));
    }
    return s;
}

std::vector<double> column_where(const Csv& csv, const std::string& col, const std::string& key_col,
                                 const std::string& key) {
    const auto c = csv.column(col), k = csv.column(key_col);
    std::vector<double> out;
    for (const auto& r : csv.rows)
        if (r.at(std::size_t(k)) == key) out.push_back(std::stod(r.at(std::size_t(c))));
    return out;
}

PlotSpec plot_csv(const std::string& path) {
    const Csv csv = read_csv(path);
    PlotSpec spec;
    spec.title = path.substr(path.find_last_of('/') + 1);
    if (csv.column("before") >= 0 && csv.column("after") >= 0 && csv.column("k") >= 0) {
        spec.x_label = "f(1)";
        spec.y_label = "probability";
        spec.series.push_back(pmf_series("before", column_where(csv, "before", "k", "1")));
        spec.series.push_back(pmf_series("after", column_where(csv, "after", "k", "1")));
    } else if (csv.column("value_over_n") >= 0) {
        spec.x_label = "G/n";
        spec.y_label = "density";
        spec.series.push_back(histogram_series("G/n", csv.numbers(csv.column("value_over_n")), 20));
    } else if (csv.column("sample_index") >= 0 && csv.column("value") >= 0) {
        spec.x_label = "f(1)";
        spec.y_label = "probability";
        spec.series.push_back(pmf_series("f(1)", column_where(csv, "value", "k", "1")));
    } else if (csv.header.size() >= 2) {
        spec.x_label = csv.header.front();
        spec.y_label = csv.header.back();
        PlotSeries s{csv.header.back(), PlotSeries::Kind::line, {}, {}};
        if (!csv.rows.empty()) {
            s.x = csv.numbers(0);
            s.y = csv.numbers(std::ptrdiff_t(csv.header.size() - 1));
        }
        spec.series.push_back(std::move(s));
    }
    return spec;
}

PlotSpec plot_reports(const std::vector<std::string>& paths) {
    PlotSpec spec;
    spec.title = "shape: mean G/n against rho_c(1 - xi)";
    spec.x_label = "xi";
    spec.y_label = "G/n";
    PlotSeries pts{"Monte Carlo", PlotSeries::Kind::points, {}, {}};
    std::optional<std::pair<double, double>> qc;
    for (const auto& p : paths) {
        const auto j = nlohmann::json::parse(read_text(p));
        if (j.at("name") != "shape") throw ConfigError(p + ": only shape reports can be plotted as a curve");
        const double q = j.at("params").at("q"), c = j.at("params").at("c");
        if (qc && (qc->first != q || qc->second != c))
            throw ConfigError("shape reports must share q and c");
        qc = {q, c};
        pts.x.push_back(j.at("params").at("xi"));
        pts.y.push_back(j.at("estimate").at("mean_g_over_n"));
    }
    if (qc) {
        const ModelParams params(qc->first, qc->second);
        PlotSeries ref{"rho_c(1 - xi)", PlotSeries::Kind::line, {}, {}};
        for (int i = 0; i <= 200; ++i) {
            const double xi = i / 200.0;
            ref.x.push_back(xi);
            ref.y.push_back(shape_rho(params, 1.0 - xi));
        }
        spec.series.push_back(std::move(ref));
    }
    spec.series.push_back(std::move(pts));
    return spec;
}

}  // namespace

PlotSpec plot_from_files(const std::vector<std::string>& inputs) {
    if (inputs.empty()) return {};
    const bool all_json = std::all_of(inputs.begin(), inputs.end(), [](const auto& p) { return ends_with(p, ".json"); });
    if (all_json) return plot_reports(inputs);
    if (inputs.size() != 1) throw ConfigError("plot takes one CSV file or a list of JSON reports");
    return plot_csv(inputs.front());
}

std::string render_svg(const PlotSpec& spec) {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool any = false, bars = false;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) x0 = x1 = s.x[i], y0 = y1 = s.y[i], any = true;
            x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
            bars = bars || s.kind == PlotSeries::Kind::bars;
        }
    if (any) {
        if (bars) x0 -= 0.5, x1 += 0.5, y0 = std::min(y0, 0.0);
        if (x1 == x0) x0 -= 0.5, x1 += 0.5;
        if (y1 == y0) y0 -= 0.5, y1 += 0.5;
        const double pad = 0.05 * (y1 - y0);
        y1 += pad;
        if (!bars) y0 -= pad;
    }
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto X = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    const auto Y = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";
    o << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\""
      << kLeft + pw << "\" y2=\"" << kTop + ph << "\"/><line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\""
      << kLeft << "\" y2=\"" << kTop + ph << "\"/></g>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = x0 + (x1 - x0) * t / 5, yv = y0 + (y1 - y0) * t / 5;
        o << "<line x1=\"" << X(xv) << "\" y1=\"" << kTop + ph << "\" x2=\"" << X(xv) << "\" y2=\"" << kTop + ph + 5
          << "\" stroke=\"black\"/><text x=\"" << X(xv) << "\" y=\"" << kTop + ph + 18
          << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << kLeft << "\" y2=\"" << Y(yv)
          << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << Y(yv) + 4
          << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << "</text>\n";

    std::size_t n_bars = 0;
    for (const auto& s : spec.series) n_bars += s.kind == PlotSeries::Kind::bars;
    std::size_t bar_index = 0;
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const char* color = kColors[si % std::size(kColors)];
        if (s.kind == PlotSeries::Kind::bars) {
            double step = 1.0;
            for (std::size_t i = 1; i < s.x.size(); ++i) step = std::min(step, s.x[i] - s.x[i - 1]);
            const double slot = step * 0.8 / double(std::max<std::size_t>(n_bars, 1));
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double left = s.x[i] - step * 0.4 + slot * double(bar_index);
                o << "<rect x=\"" << X(left) << "\" y=\"" << Y(s.y[i]) << "\" width=\"" << X(left + slot) - X(left)
                  << "\" height=\"" << Y(std::max(y0, 0.0)) - Y(s.y[i]) << "\" fill=\"" << color
                  << "\" fill-opacity=\"0.7\"/>\n";
            }
            ++bar_index;
        } else if (s.kind == PlotSeries::Kind::line && !s.x.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << X(s.x[i]) << ',' << Y(s.y[i]);
            o << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\"3.5\" fill=\"" << color
                  << "\"/>\n";
        }
        const double ly = kTop + 8 + 16.0 * double(si);
        o << "<rect x=\"" << kLeft + pw - 150 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
          << "\"/><text x=\"" << kLeft + pw - 135 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace lpplab::cli
