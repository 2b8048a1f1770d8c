#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "physedit/harness.hpp"

namespace physedit {
namespace {

// Fixed 9-significant-digit rendering so identical reports serialize to
// identical bytes.
std::string fmt_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

void json_string(std::ostream& out, const std::string& s) {
    out << '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\b': out << "\\b"; break;
            case '\f': out << "\\f"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            case '\t': out << "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out << buf;
                } else {
                    out << static_cast<char>(c);
                }
        }
    }
    out << '"';
}

}  // namespace

void write_csv(const Report& report, std::ostream& out) {
    out << "scenario,bucket,config,edit_mse,preserve_mse,mask_iou,frame_steps\n";
    for (const ReportRow& row : report.rows) {
        out << row.scenario << ',' << level_name(row.bucket) << ','
            << row.config << ',';
        if (row.error.empty()) {
            out << fmt_real(row.metrics.edit_mse) << ','
                << fmt_real(row.metrics.preserve_mse) << ','
                << fmt_real(row.metrics.mask_iou) << ','
                << row.metrics.frame_steps << '\n';
        } else {
            out << "nan,nan,nan,0\n";
        }
    }
}

void write_json(const Report& report, std::ostream& out) {
    out << '{';
    out << "\"baseline_config\":";
    json_string(out, report.baseline_config);

    out << ",\"bucket_aggregates\":[";
    for (std::size_t i = 0; i < report.buckets.size(); ++i) {
        const BucketAggregate& b = report.buckets[i];
        if (i > 0) out << ',';
        out << "{\"bucket\":\"" << level_name(b.bucket) << "\",\"config\":";
        json_string(out, b.config);
        out << ",\"count\":" << b.count
            << ",\"mean_edit_mse\":" << fmt_real(b.mean_edit_mse)
            << ",\"mean_frame_steps\":" << fmt_real(b.mean_frame_steps)
            << ",\"mean_mask_iou\":" << fmt_real(b.mean_mask_iou)
            << ",\"mean_preserve_mse\":" << fmt_real(b.mean_preserve_mse)
            << ",\"speedup_vs_baseline\":" << fmt_real(b.speedup_vs_baseline)
            << '}';
    }
    out << ']';

    out << ",\"config_aggregates\":[";
    for (std::size_t i = 0; i < report.configs.size(); ++i) {
        const ConfigAggregate& c = report.configs[i];
        if (i > 0) out << ',';
        out << "{\"config\":";
        json_string(out, c.config);
        out << ",\"count\":" << c.count
            << ",\"mean_edit_mse\":" << fmt_real(c.mean_edit_mse)
            << ",\"mean_frame_steps\":" << fmt_real(c.mean_frame_steps)
            << ",\"mean_mask_iou\":" << fmt_real(c.mean_mask_iou)
            << ",\"mean_preserve_mse\":" << fmt_real(c.mean_preserve_mse)
            << ",\"speedup_vs_baseline\":" << fmt_real(c.speedup_vs_baseline)
            << ",\"weighted_mean_frame_steps\":"
            << fmt_real(c.weighted_mean_frame_steps)
            << ",\"weighted_speedup_vs_baseline\":"
            << fmt_real(c.weighted_speedup_vs_baseline) << '}';
    }
    out << ']';

    out << ",\"confusion\":[";
    for (std::size_t i = 0; i < report.confusion.size(); ++i) {
        const ConfusionEntry& e = report.confusion[i];
        if (i > 0) out << ',';
        out << "{\"config\":";
        json_string(out, e.config);
        out << ",\"counts\":{";
        // Alphabetical keys: high (2), low (0), medium (1).
        const int order[3] = {2, 0, 1};
        const char* names[3] = {"high", "low", "medium"};
        for (int a = 0; a < 3; ++a) {
            if (a > 0) out << ',';
            out << '"' << names[a] << "\":{";
            for (int b = 0; b < 3; ++b) {
                if (b > 0) out << ',';
                out << '"' << names[b]
                    << "\":" << e.counts[order[a]][order[b]];
            }
            out << '}';
        }
        out << "}}";
    }
    out << ']';

    out << ",\"failed_rows\":" << report.failed_rows;

    out << ",\"rows\":[";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& row = report.rows[i];
        if (i > 0) out << ',';
        out << "{\"bucket\":\"" << level_name(row.bucket) << "\",\"config\":";
        json_string(out, row.config);
        out << ",\"edit_mse\":" << fmt_real(row.metrics.edit_mse)
            << ",\"error\":";
        json_string(out, row.error);
        out << ",\"frame_steps\":" << row.metrics.frame_steps
            << ",\"mask_iou\":" << fmt_real(row.metrics.mask_iou);
        if (row.predicted.has_value()) {
            out << ",\"predicted\":\"" << level_name(*row.predicted) << '"';
        }
        out << ",\"preserve_mse\":" << fmt_real(row.metrics.preserve_mse)
            << ",\"scenario\":";
        json_string(out, row.scenario);
        out << '}';
    }
    out << "]}";
    out << '\n';
}

void emit_report(const Report& report, const std::string& format,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    if (format == "csv") {
        write_csv(report, out);
    } else if (format == "json") {
        write_json(report, out);
    } else {
        throw ConfigError("unknown report format '" + format +
                          "' (expected csv or json)");
    }
    out.flush();
    if (!out) {
        throw IoError("failed writing report to '" + path + "'");
    }
}

}  // namespace physedit
