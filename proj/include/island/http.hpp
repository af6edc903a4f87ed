#pragma once

// Single include point for cpp-httplib so every translation unit sees the
// same feature macros.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
