#include "rfdaq/analysis/image.hpp"

#include <algorithm>
#include <cmath>

namespace rfdaq::analysis {

RfImage render_image(const SampleBlock& envelope_block, double speed_of_sound) {
    if (envelope_block.channels <= 0 || envelope_block.data.empty())
        throw StageError(Stage::analysis, "cannot render an empty block");
    RfImage img;
    img.channels = static_cast<size_t>(envelope_block.channels);
    img.depth = envelope_block.samples_per_channel();
    img.us_per_sample = 1e6 / envelope_block.sample_rate;
    img.mm_per_sample = speed_of_sound / 2.0 / envelope_block.sample_rate * 1e3;
    img.pixels.resize(img.channels * img.depth);

    double peak = 0.0;
    for (int16_t v : envelope_block.data)
        peak = std::max(peak, std::abs(static_cast<double>(v)));
    if (peak == 0.0) return img;  // all-zero input stays all-zero
    for (size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = std::abs(static_cast<double>(envelope_block.data[i])) / peak;
    return img;
}

void write_pgm(std::ostream& os, const RfImage& image) {
    os << "P5\n" << image.depth << ' ' << image.channels << "\n255\n";
    for (double v : image.pixels) {
        const int g = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        os.put(static_cast<char>(g));
    }
}

void write_image_csv(std::ostream& os, const RfImage& image) {
    os << "channel,depth_sample,time_us,depth_mm,value\n";
    for (size_t c = 0; c < image.channels; ++c)
        for (size_t d = 0; d < image.depth; ++d)
            os << c << ',' << d << ',' << static_cast<double>(d) * image.us_per_sample << ','
               << static_cast<double>(d) * image.mm_per_sample << ',' << image.at(c, d) << '\n';
}

}  // namespace rfdaq::analysis
