"""
Capillary Killing graphs over domains in warped products: a continuation
solver for the prescribed mean curvature / prescribed contact angle problem and
numerical certificates for its a-priori estimates.
"""
