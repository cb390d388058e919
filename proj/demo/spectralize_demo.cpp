// Turns one RGB PNG into a pseudo-spectral image and three noisy variants.
//
//   spectralize_demo input.png out_prefix [seed]

#include <cstdlib>
#include <iostream>
#include <string>

#include "hsaug/hsaug.hpp"

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: " << argv[0] << " input.png out_prefix [seed]\n";
        return 1;
    }
    try {
        const auto rgb = hsaug::read_png(argv[1]);
        const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 0;

        hsaug::SpectralParams spectral;
        hsaug::NoiseParams noise;
        const auto clean = hsaug::spectralize(rgb, spectral);
        hsaug::write_png(std::string(argv[2]) + "_clean.png", clean);

        const hsaug::LabelMask blank(clean.width(), clean.height());
        for (int r = 0; r < 3; ++r) {
            hsaug::Rng rng(hsaug::derive_seed(seed, argv[1], r, "noise"));
            const auto plan = hsaug::plan_noise(noise, clean.width(), clean.height(), rng);
            const auto [noisy, mask] = hsaug::apply_noise(clean, blank, plan, noise.c2);
            hsaug::write_png(std::string(argv[2]) + "_noisy" + std::to_string(r) + ".png", noisy);
            std::cout << "realization " << r << ": " << plan.vertical_columns.size() << " stripes\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
