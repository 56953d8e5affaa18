#include "rfdaq/afe/frontend.hpp"

#include <cmath>

#include "rfdaq/analysis/filters.hpp"

namespace rfdaq::afe {

SampleBlock iq_demodulate(const SampleBlock& raw, double f_center, int decimation) {
    const double fs = raw.sample_rate;
    if (decimation < 2) throw StageError(Stage::generate, "decimation must be at least 2");
    if (!(f_center > 0.0) || f_center >= fs / 2.0)
        throw StageError(Stage::generate, "carrier outside (0, fs/2)");

    const size_t spc = raw.samples_per_channel();
    const double out_nyq = 0.5 / decimation;  // cycles/sample at the input rate
    analysis::FirFilter lp = analysis::design_lowpass(
        0.8 * out_nyq, 60.0, analysis::kaiser_tap_count(60.0, 0.4 * out_nyq));

    // Output samples sit on absolute indices divisible by the decimation
    // factor, so consecutive blocks of one stream stay on a common grid.
    const uint64_t start = raw.start_index;
    const uint64_t first = (start + decimation - 1) / decimation * decimation;
    const size_t n_out = first >= start + spc
                             ? 0
                             : (start + spc - 1 - first) / static_cast<uint64_t>(decimation) + 1;

    SampleBlock out(raw.channels * 2, n_out, first / decimation, fs / decimation);
    std::vector<double> i_mix(spc), q_mix(spc);
    for (int ch = 0; ch < raw.channels; ++ch) {
        for (size_t i = 0; i < spc; ++i) {
            const double t = static_cast<double>(start + i) / fs;
            const double w = 2.0 * M_PI * f_center * t;
            const double x = raw.sample(ch, i);
            i_mix[i] = x * std::cos(w);
            q_mix[i] = -x * std::sin(w);
        }
        const auto i_f = analysis::apply_fir(lp, i_mix);
        const auto q_f = analysis::apply_fir(lp, q_mix);
        for (size_t o = 0; o < n_out; ++o) {
            const size_t i = static_cast<size_t>(first - start) + o * decimation;
            out.sample(2 * ch, o) = saturate16(2.0 * i_f[i]);
            out.sample(2 * ch + 1, o) = saturate16(2.0 * q_f[i]);
        }
    }
    return out;
}

}  // namespace rfdaq::afe
