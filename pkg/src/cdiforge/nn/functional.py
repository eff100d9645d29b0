"""Stateless 3D layer kernels and their exact adjoints.

Feature maps are ``(batch, channels, x, y, z)`` arrays. Every kernel keeps
the precision of its inputs, so gradient checks run by passing float64.
"""

import math

import numpy as np

from cdiforge.errors import VolumeError


def _pad_width(kernel_size: int) -> tuple[tuple[int, int], ...]:
    p = kernel_size // 2
    return ((0, 0), (0, 0), (p, p), (p, p), (p, p))


def _check_conv(x: np.ndarray, kernel: np.ndarray) -> None:
    if x.ndim != 5 or kernel.ndim != 5:
        raise VolumeError(f"conv3d expects 5D input and kernel, got {x.shape} and {kernel.shape}")
    if x.shape[1] != kernel.shape[1]:
        raise VolumeError(f"conv3d: input has {x.shape[1]} channels, kernel {kernel.shape[1]}")
    k = kernel.shape[2]
    if kernel.shape[2:] != (k, k, k) or k % 2 == 0:
        raise VolumeError(f"conv3d needs a cubic odd kernel, got {kernel.shape[2:]}")


def conv3d_forward(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Stride-1 'same' cross-correlation plus bias."""
    _check_conv(x, kernel)
    if bias.shape != (kernel.shape[0],):
        raise VolumeError(f"conv3d: bias shape {bias.shape} for {kernel.shape[0]} channels")
    k = kernel.shape[2]
    batch, _, d, h, w = x.shape
    padded = np.pad(x, _pad_width(k))
    dtype = np.result_type(x, kernel, bias)
    out = np.zeros((batch, d, h, w, kernel.shape[0]), dtype=dtype)
    for a, b, c in np.ndindex(k, k, k):
        patch = padded[:, :, a : a + d, b : b + h, c : c + w]
        out += np.tensordot(patch, kernel[:, :, a, b, c], axes=([1], [1]))
    out += bias
    return np.ascontiguousarray(np.moveaxis(out, -1, 1))


def conv3d_backward(
    x: np.ndarray, kernel: np.ndarray, grad_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of a summed objective w.r.t. input, kernel and bias."""
    _check_conv(x, kernel)
    expected = (x.shape[0], kernel.shape[0], *x.shape[2:])
    if grad_out.shape != expected:
        raise VolumeError(f"conv3d_backward: grad_out {grad_out.shape}, expected {expected}")
    k = kernel.shape[2]
    p = k // 2
    _, _, d, h, w = x.shape
    padded = np.pad(x, _pad_width(k))
    dtype = np.result_type(x, kernel, grad_out)

    grad_padded = np.zeros(padded.shape, dtype=dtype)
    grad_kernel = np.zeros(kernel.shape, dtype=dtype)
    for a, b, c in np.ndindex(k, k, k):
        patch = padded[:, :, a : a + d, b : b + h, c : c + w]
        grad_kernel[:, :, a, b, c] = np.tensordot(
            grad_out, patch, axes=([0, 2, 3, 4], [0, 2, 3, 4])
        )
        back = np.tensordot(grad_out, kernel[:, :, a, b, c], axes=([1], [0]))
        grad_padded[:, :, a : a + d, b : b + h, c : c + w] += np.moveaxis(back, -1, 1)

    grad_x = grad_padded[:, :, p : p + d, p : p + h, p : p + w]
    grad_bias = grad_out.sum(axis=(0, 2, 3, 4)).astype(dtype)
    return np.ascontiguousarray(grad_x), grad_kernel, grad_bias


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(x: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    return grad_out * (x > 0)


def _cells(x: np.ndarray) -> np.ndarray:
    """View (B, C, X, Y, Z) as (B, C, X/2, Y/2, Z/2, 8) pooling cells."""
    batch, channels, d, h, w = x.shape
    if d % 2 or h % 2 or w % 2:
        raise VolumeError(f"maxpool2 needs even spatial dims, got {(d, h, w)}")
    cells = x.reshape(batch, channels, d // 2, 2, h // 2, 2, w // 2, 2)
    cells = cells.transpose(0, 1, 2, 4, 6, 3, 5, 7)
    return cells.reshape(batch, channels, d // 2, h // 2, w // 2, 8)


def maxpool2_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2x2 stride-2 max pooling; returns the pooled map and the winning cell index.

    Ties go to the first index of the cell in (x, y, z) order.
    """
    cells = _cells(x)
    winner = np.argmax(cells, axis=-1)
    pooled = np.take_along_axis(cells, winner[..., None], axis=-1)[..., 0]
    return pooled, winner


def maxpool2_backward(
    grad_out: np.ndarray, winner: np.ndarray, input_shape: tuple[int, ...]
) -> np.ndarray:
    batch, channels, d, h, w = input_shape
    cells = np.zeros((*grad_out.shape, 8), dtype=grad_out.dtype)
    np.put_along_axis(cells, winner[..., None], grad_out[..., None], axis=-1)
    cells = cells.reshape(batch, channels, d // 2, h // 2, w // 2, 2, 2, 2)
    cells = cells.transpose(0, 1, 2, 5, 3, 6, 4, 7)
    return cells.reshape(input_shape)


def upsample2_forward(x: np.ndarray) -> np.ndarray:
    """Nearest-neighbour 2x upsampling along every spatial axis."""
    return x.repeat(2, axis=2).repeat(2, axis=3).repeat(2, axis=4)


def upsample2_backward(grad_out: np.ndarray) -> np.ndarray:
    batch, channels, d, h, w = grad_out.shape
    cells = grad_out.reshape(batch, channels, d // 2, 2, h // 2, 2, w // 2, 2)
    return cells.sum(axis=(3, 5, 7))


def dropout_forward(
    x: np.ndarray, rate: float, rng: np.random.Generator, training: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout. Returns the output and the scaled keep mask (None when inactive)."""
    if not training or rate <= 0:
        return x, None
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / x.dtype.type(1.0 - rate)
    return x * mask, mask


def dropout_backward(grad_out: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    return grad_out if mask is None else grad_out * mask


def sigmoid_forward(x: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    e = np.exp(x[~positive])
    out[~positive] = e / (1.0 + e)
    return out


def sigmoid_backward(y: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    return grad_out * y * (1 - y)


def scaled_tanh_forward(x: np.ndarray, scale: float = math.pi) -> np.ndarray:
    return x.dtype.type(scale) * np.tanh(x)


def scaled_tanh_backward(x: np.ndarray, grad_out: np.ndarray, scale: float = math.pi) -> np.ndarray:
    return grad_out * x.dtype.type(scale) * (1 - np.tanh(x) ** 2)
