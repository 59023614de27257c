#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "wordgeom/csv.hpp"
#include "wordgeom/pipeline.hpp"

namespace wordgeom {

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 40, kTop = 40, kBottom = 60;

struct Range {
    double lo = 0.0, hi = 1.0;
    bool any = false;

    void include(double v) {
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!any) {
            lo = -1.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        double pad = (hi - lo) * 0.06;
        lo -= pad;
        hi += pad;
    }
};

std::string svg_header() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           coord(kWidth) + "\" height=\"" + coord(kHeight) +
           "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n"
           "<rect width=\"" + coord(kWidth) + "\" height=\"" +
           coord(kHeight) + "\" fill=\"white\"/>\n";
}

void axis_frame(std::string& svg) {
    svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) +
           "\" width=\"" + coord(kWidth - kLeft - kRight) + "\" height=\"" +
           coord(kHeight - kTop - kBottom) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
}

void y_ticks(std::string& svg, const Range& range,
             const std::function<double(double)>& y_of) {
    for (int i = 0; i <= 4; ++i) {
        double v = range.lo + (range.hi - range.lo) * i / 4.0;
        double y = y_of(v);
        svg += "<line x1=\"" + coord(kLeft - 4) + "\" y1=\"" + coord(y) +
               "\" x2=\"" + coord(kLeft) + "\" y2=\"" + coord(y) +
               "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) +
               "\" text-anchor=\"end\">" + xml_escape(tick_label(v)) +
               "</text>\n";
    }
}

std::string render_line_chart(const SeriesReport& report) {
    Range range;
    for (const auto& row : report.cells) {
        for (const auto& cell : row) {
            if (cell.value) range.include(*cell.value);
            if (cell.lower) range.include(*cell.lower);
            if (cell.upper) range.include(*cell.upper);
        }
    }
    range.finish();

    const std::size_t n_labels = report.labels.size();
    auto x_of = [&](std::size_t i) {
        double span = kWidth - kLeft - kRight;
        if (n_labels <= 1) return kLeft + span / 2.0;
        return kLeft + span * static_cast<double>(i) /
                           static_cast<double>(n_labels - 1);
    };
    auto y_of = [&](double v) {
        double span = kHeight - kTop - kBottom;
        return kTop + span * (range.hi - v) / (range.hi - range.lo);
    };

    std::string svg = svg_header();
    axis_frame(svg);
    y_ticks(svg, range, y_of);

    for (std::size_t i = 0; i < n_labels; ++i) {
        svg += "<text x=\"" + coord(x_of(i)) + "\" y=\"" +
               coord(kHeight - kBottom + 18) +
               "\" text-anchor=\"middle\">" + xml_escape(report.labels[i]) +
               "</text>\n";
    }

    if (report.rows.empty() || n_labels == 0)
        svg += "<text x=\"" + coord(kWidth / 2) + "\" y=\"" +
               coord(kHeight / 2) + "\" text-anchor=\"middle\" "
               "fill=\"#888888\">no data</text>\n";

    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const char* color = kPalette[r % kPaletteSize];
        std::string points;
        for (std::size_t i = 0; i < n_labels; ++i) {
            const ReportCell& cell = report.cells[r][i];
            if (!cell.value) continue;
            if (!points.empty()) points += ' ';
            points += coord(x_of(i)) + "," + coord(y_of(*cell.value));
            // CI whiskers
            if (cell.lower && cell.upper) {
                double x = x_of(i);
                svg += "<line x1=\"" + coord(x) + "\" y1=\"" +
                       coord(y_of(*cell.lower)) + "\" x2=\"" + coord(x) +
                       "\" y2=\"" + coord(y_of(*cell.upper)) +
                       "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
                for (double bound : {*cell.lower, *cell.upper})
                    svg += "<line x1=\"" + coord(x - 3) + "\" y1=\"" +
                           coord(y_of(bound)) + "\" x2=\"" + coord(x + 3) +
                           "\" y2=\"" + coord(y_of(bound)) + "\" stroke=\"" +
                           color + "\" stroke-width=\"1\"/>\n";
            }
            svg += "<circle cx=\"" + coord(x_of(i)) + "\" cy=\"" +
                   coord(y_of(*cell.value)) + "\" r=\"2.5\" fill=\"" + color +
                   "\"/>\n";
        }
        if (!points.empty())
            svg += "<polyline points=\"" + points +
                   "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
        // legend
        double ly = kTop + 14 + 16 * static_cast<double>(r);
        svg += "<rect x=\"" + coord(kWidth - kRight - 150) + "\" y=\"" +
               coord(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
               color + "\"/>\n";
        svg += "<text x=\"" + coord(kWidth - kRight - 136) + "\" y=\"" +
               coord(ly) + "\">" + xml_escape(report.rows[r]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_scatter(const SeriesReport& report) {
    if (report.labels.size() != 2)
        throw std::invalid_argument(
            "scatter rendering needs exactly two labels");
    Range xr, yr;
    for (const auto& row : report.cells) {
        if (row[0].value) xr.include(*row[0].value);
        if (row[0].lower) xr.include(*row[0].lower);
        if (row[0].upper) xr.include(*row[0].upper);
        if (row[1].value) yr.include(*row[1].value);
        if (row[1].lower) yr.include(*row[1].lower);
        if (row[1].upper) yr.include(*row[1].upper);
    }
    xr.finish();
    yr.finish();

    auto x_of = [&](double v) {
        double span = kWidth - kLeft - kRight;
        return kLeft + span * (v - xr.lo) / (xr.hi - xr.lo);
    };
    auto y_of = [&](double v) {
        double span = kHeight - kTop - kBottom;
        return kTop + span * (yr.hi - v) / (yr.hi - yr.lo);
    };

    std::string svg = svg_header();
    axis_frame(svg);
    y_ticks(svg, yr, y_of);
    for (int i = 0; i <= 4; ++i) {
        double v = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        double x = x_of(v);
        svg += "<line x1=\"" + coord(x) + "\" y1=\"" +
               coord(kHeight - kBottom) + "\" x2=\"" + coord(x) + "\" y2=\"" +
               coord(kHeight - kBottom + 4) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + coord(x) + "\" y=\"" +
               coord(kHeight - kBottom + 18) + "\" text-anchor=\"middle\">" +
               xml_escape(tick_label(v)) + "</text>\n";
    }
    svg += "<text x=\"" + coord(kWidth / 2) + "\" y=\"" +
           coord(kHeight - 12) + "\" text-anchor=\"middle\">" +
           xml_escape(report.labels[0]) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + coord(kHeight / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           coord(kHeight / 2) + ")\">" + xml_escape(report.labels[1]) +
           "</text>\n";

    const char* color = kPalette[0];
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const ReportCell& cx = report.cells[r][0];
        const ReportCell& cy = report.cells[r][1];
        if (!cx.value || !cy.value) continue;
        double px = x_of(*cx.value), py = y_of(*cy.value);
        if (cx.lower && cx.upper)
            svg += "<line x1=\"" + coord(x_of(*cx.lower)) + "\" y1=\"" +
                   coord(py) + "\" x2=\"" + coord(x_of(*cx.upper)) +
                   "\" y2=\"" + coord(py) + "\" stroke=\"" + color +
                   "\" stroke-width=\"1\"/>\n";
        if (cy.lower && cy.upper)
            svg += "<line x1=\"" + coord(px) + "\" y1=\"" +
                   coord(y_of(*cy.lower)) + "\" x2=\"" + coord(px) +
                   "\" y2=\"" + coord(y_of(*cy.upper)) + "\" stroke=\"" +
                   color + "\" stroke-width=\"1\"/>\n";
        svg += "<circle cx=\"" + coord(px) + "\" cy=\"" + coord(py) +
               "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + coord(px + 5) + "\" y=\"" + coord(py - 4) +
               "\">" + xml_escape(report.rows[r]) + "</text>\n";
    }
    if (report.rows.empty())
        svg += "<text x=\"" + coord(kWidth / 2) + "\" y=\"" +
               coord(kHeight / 2) + "\" text-anchor=\"middle\" "
               "fill=\"#888888\">no data</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace

RenderFormat render_format_from_string(const std::string& name) {
    if (name == "csv") return RenderFormat::csv;
    if (name == "json") return RenderFormat::json;
    if (name == "svg") return RenderFormat::svg;
    throw std::invalid_argument("unknown render format \"" + name + "\"");
}

std::string render_to_string(const SeriesReport& report, RenderFormat format) {
    switch (format) {
        case RenderFormat::json:
            return report.to_json().dump(2) + "\n";
        case RenderFormat::csv: {
            std::string out = "row,label,value,lower,upper,reason\n";
            for (std::size_t r = 0; r < report.rows.size(); ++r) {
                for (std::size_t l = 0; l < report.labels.size(); ++l) {
                    const ReportCell& cell = report.cells[r][l];
                    out += csv_quote(report.rows[r]) + "," +
                           csv_quote(report.labels[l]) + ",";
                    if (cell.value) out += g17(*cell.value);
                    out += ",";
                    if (cell.lower) out += g17(*cell.lower);
                    out += ",";
                    if (cell.upper) out += g17(*cell.upper);
                    out += "," + csv_quote(cell.reason) + "\n";
                }
            }
            return out;
        }
        case RenderFormat::svg:
            return report.kind == "compare" ? render_scatter(report)
                                            : render_line_chart(report);
    }
    throw std::logic_error("unreachable");
}

void render(const SeriesReport& report, RenderFormat format,
            const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + out_path + " for writing");
    std::string text = render_to_string(report, format);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace wordgeom
