"""Imaging-free target recognition from ghost-imaging bucket signals.

Pipeline: a fixed random speckle sequence illuminates a target; a bucket
detector's scalar readings fold into a 2-D bucket-signal array; a
label-conditioned GAN with an auxiliary class head learns to recognize
targets directly from those arrays, skipping image reconstruction entirely.
Recognition is only defined under the training-time speckle sequence, which
is enforced by content fingerprints end to end.
"""

__version__ = "0.1.0"
