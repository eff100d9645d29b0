"""Layer modules with cached forward state and manual backward passes."""

import math

import numpy as np

from cdiforge.nn import functional as F


class Module:
    """Something that maps an input to an output and can differentiate that map.

        output = module.forward(input)
        input_grad = module.backward(output_grad)

    ``backward`` uses what the last ``forward`` cached, so calls must pair up.
    Parameter gradients from the last ``backward`` are kept in ``gradients()``.
    """

    def __init__(self) -> None:
        self.training = True

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def parameters(self) -> list[np.ndarray]:
        return []

    def gradients(self) -> list[np.ndarray]:
        return []

    def train(self) -> None:
        self.training = True

    def evaluate(self) -> None:
        self.training = False

    def __repr__(self) -> str:
        return type(self).__name__


class Conv3d(Module):
    """3D 'same' convolution, weights initialized uniform in +-1/sqrt(fan_in)."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator):
        super().__init__()
        fan_in = in_channels * kernel**3
        bound = 1.0 / math.sqrt(fan_in)
        shape = (out_channels, in_channels, kernel, kernel, kernel)
        self.weight = rng.uniform(-bound, bound, size=shape).astype(np.float32)
        self.bias = np.zeros(out_channels, dtype=np.float32)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._input = x
        return F.conv3d_forward(x, self.weight, self.bias)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        assert self._input is not None, "backward before forward"
        grad_x, self.grad_weight, self.grad_bias = F.conv3d_backward(
            self._input, self.weight, grad_out
        )
        return grad_x

    def parameters(self) -> list[np.ndarray]:
        return [self.weight, self.bias]

    def gradients(self) -> list[np.ndarray]:
        return [self.grad_weight, self.grad_bias]

    def __repr__(self) -> str:
        c_out, c_in, k = self.weight.shape[:3]
        return f"Conv3d({c_in}->{c_out}, k={k})"


class ReLU(Module):
    def __init__(self) -> None:
        super().__init__()
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._input = x
        return F.relu_forward(x)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        assert self._input is not None, "backward before forward"
        return F.relu_backward(self._input, grad_out)


class Dropout(Module):
    """Inverted dropout; identity in evaluation mode."""

    def __init__(self, rate: float, rng: np.random.Generator) -> None:
        super().__init__()
        self.rate = rate
        self.rng = rng
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, self._mask = F.dropout_forward(x, self.rate, self.rng, self.training)
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return F.dropout_backward(grad_out, self._mask)

    def __repr__(self) -> str:
        return f"Dropout({self.rate})"


class MaxPool2(Module):
    def __init__(self) -> None:
        super().__init__()
        self._winner: np.ndarray | None = None
        self._shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        out, self._winner = F.maxpool2_forward(x)
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        assert self._winner is not None, "backward before forward"
        return F.maxpool2_backward(grad_out, self._winner, self._shape)


class Upsample2(Module):
    def forward(self, x: np.ndarray) -> np.ndarray:
        return F.upsample2_forward(x)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return F.upsample2_backward(grad_out)


class Sigmoid(Module):
    def __init__(self) -> None:
        super().__init__()
        self._output: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._output = F.sigmoid_forward(x)
        return self._output

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        assert self._output is not None, "backward before forward"
        return F.sigmoid_backward(self._output, grad_out)


class ScaledTanh(Module):
    """scale * tanh(x); the phase head uses scale = pi."""

    def __init__(self, scale: float = math.pi) -> None:
        super().__init__()
        self.scale = scale
        self._input: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._input = x
        return F.scaled_tanh_forward(x, self.scale)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        assert self._input is not None, "backward before forward"
        return F.scaled_tanh_backward(self._input, grad_out, self.scale)


class Sequential(Module):
    """Applies its modules in order; backward runs them in reverse."""

    def __init__(self, *modules: Module) -> None:
        super().__init__()
        self.modules = list(modules)

    def add_module(self, module: Module) -> None:
        self.modules.append(module)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for module in self.modules:
            x = module.forward(x)
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for module in reversed(self.modules):
            grad_out = module.backward(grad_out)
        return grad_out

    def parameters(self) -> list[np.ndarray]:
        return [p for module in self.modules for p in module.parameters()]

    def gradients(self) -> list[np.ndarray]:
        return [g for module in self.modules for g in module.gradients()]

    def train(self) -> None:
        super().train()
        for module in self.modules:
            module.train()

    def evaluate(self) -> None:
        super().evaluate()
        for module in self.modules:
            module.evaluate()

    def __repr__(self) -> str:
        inner = "\n".join(f"  {m!r}" for m in self.modules)
        return f"Sequential(\n{inner}\n)"
