#include "rfdaq/io/csv.hpp"

namespace rfdaq::io {

std::ofstream open_text(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw StageError(Stage::io, "cannot open " + path.string() + " for writing");
    return os;
}

std::ofstream open_binary(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StageError(Stage::io, "cannot open " + path.string() + " for writing");
    return os;
}

void write_gain_csv(std::ostream& os, const analysis::BandwidthResult& bw) {
    os << "frequency_hz,a_pp,gain_db\n";
    for (const analysis::TonePoint& pt : bw.points)
        os << pt.frequency << ',' << pt.a_pp << ',' << pt.gain_db << '\n';
    os << "# f_peak_hz," << bw.f_peak << '\n';
    os << "# f_lo_hz," << (bw.f_lo ? std::to_string(*bw.f_lo) : "absent") << '\n';
    os << "# f_hi_hz," << (bw.f_hi ? std::to_string(*bw.f_hi) : "absent") << '\n';
}

void write_snr_csv(std::ostream& os,
                   std::span<const std::pair<double, analysis::SnrResult>> rows) {
    os << "frequency_hz,p_sig,p_noise,snr_db,fundamental_bin,masked_ranges\n";
    for (const auto& [freq, snr] : rows) {
        os << freq << ',' << snr.p_sig << ',' << snr.p_noise << ',' << snr.snr_db << ','
           << snr.fundamental_bin << ',';
        for (size_t i = 0; i < snr.mask.size(); ++i) {
            if (i) os << ' ';
            os << snr.mask[i].lo << '-' << snr.mask[i].hi;
        }
        os << '\n';
    }
}

}  // namespace rfdaq::io
