#pragma once

// Umbrella header.

#include "metakit/bias.hpp"
#include "metakit/effect_measures.hpp"
#include "metakit/error.hpp"
#include "metakit/format.hpp"
#include "metakit/medline.hpp"
#include "metakit/pooling.hpp"
#include "metakit/prisma.hpp"
#include "metakit/render.hpp"
#include "metakit/review.hpp"
#include "metakit/review_io.hpp"
#include "metakit/risk_of_bias.hpp"
#include "metakit/settings.hpp"
#include "metakit/stats.hpp"
