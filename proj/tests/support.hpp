#pragma once

#include "doctest.h"

#include "plural/error.hpp"

namespace plural::testing {

// Runs `f` and returns the code of the plural::Error it throws.
ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace plural::testing
