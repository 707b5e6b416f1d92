#pragma once

// Everything at once.

#include "connexa/acceptance.hpp"
#include "connexa/cli.hpp"
#include "connexa/connmat.hpp"
#include "connexa/document.hpp"
#include "connexa/euler.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/linalg.hpp"
#include "connexa/malgrange.hpp"
#include "connexa/odekit.hpp"
#include "connexa/origin.hpp"
#include "connexa/rational.hpp"
#include "connexa/sampling.hpp"
#include "connexa/scalar.hpp"
#include "connexa/series.hpp"
