#pragma once

#include "hsaug/image.hpp"
#include "hsaug/imaging.hpp"
#include "hsaug/rng.hpp"
#include "hsaug/noise.hpp"
#include "hsaug/geo.hpp"
#include "hsaug/annotations.hpp"
#include "hsaug/png_io.hpp"
#include "hsaug/config.hpp"
#include "hsaug/manifest.hpp"
#include "hsaug/pipeline.hpp"
#include "hsaug/metrics.hpp"
#include "hsaug/profile.hpp"
#include "hsaug/type_analysis.hpp"
