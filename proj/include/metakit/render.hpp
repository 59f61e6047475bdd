#pragma once

#include <string>
#include <string_view>

#include "metakit/render/forest.hpp"
#include "metakit/render/funnel.hpp"
#include "metakit/render/prisma.hpp"
#include "metakit/render/rob.hpp"
#include "metakit/review.hpp"

namespace metakit::render {

// <review-slug>__<figure>.svg
inline std::string figure_filename(const Review& r, std::string_view figure) {
    return slugify(r.title) + "__" + std::string(figure) + ".svg";
}

} // namespace metakit::render
