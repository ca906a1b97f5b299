#pragma once

// Umbrella header.

#include "synd/diagram.hpp"   // IWYU pragma: export
#include "synd/engine.hpp"    // IWYU pragma: export
#include "synd/errors.hpp"    // IWYU pragma: export
#include "synd/generators/cfg.hpp"            // IWYU pragma: export
#include "synd/generators/prolog.hpp"         // IWYU pragma: export
#include "synd/generators/string_grammar.hpp" // IWYU pragma: export
#include "synd/generators/valency.hpp"        // IWYU pragma: export
#include "synd/grammar.hpp"   // IWYU pragma: export
#include "synd/io.hpp"        // IWYU pragma: export
#include "synd/matcher.hpp"   // IWYU pragma: export
