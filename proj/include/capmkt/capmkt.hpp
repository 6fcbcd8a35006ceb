#pragma once

#include "capmkt/auction.hpp"
#include "capmkt/energy.hpp"
#include "capmkt/error.hpp"
#include "capmkt/io.hpp"
#include "capmkt/lp.hpp"
#include "capmkt/model.hpp"
#include "capmkt/pipeline.hpp"
#include "capmkt/strategic.hpp"
