"""TTS synthesis with voice rotation, an on-disk cache, and an offline mock.

All audio is 16 kHz 16-bit PCM mono WAV.  The mock provider renders each
character as a fixed-frequency tone segment, so output bytes are a pure
function of (text, voice_id) and the whole pipeline runs without network
access.  Cloud providers speak a small JSON-over-HTTPS protocol and return
base64 audio.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import os
import threading
import time
import wave
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Manifest, Provenance, Utterance

PROVIDERS = ("mock", "cloud_a", "cloud_b")
VOICE_GENDERS = ("M", "F")

SAMPLE_RATE = 16000
SAMPLE_WIDTH = 2
CHANNELS = 1
AUDIO_FORMAT = "pcm16-16000-mono"
# mock renders 960 samples (0.06 s) per character
CHAR_SAMPLES = 960
MAX_TEXT_CHARS = 5000

ENV_KEY = "PIVOTFORGE_TTS_KEY"
ENV_URL = "PIVOTFORGE_TTS_URL"


class SynthesisError(Exception):
    """Base class for synthesis failures."""


class TextTooLongError(SynthesisError):
    """Text exceeds the provider character limit."""


class ProviderError(SynthesisError):
    """Provider rejected the request; retrying will not help."""


class RetryExhaustedError(SynthesisError):
    """Transient failures persisted through every allowed retry."""


@dataclass(frozen=True)
class Voice:
    """One provider voice; `language` is the language the voice speaks."""

    provider: str
    voice_id: str
    language: str
    gender: str

    def __post_init__(self):
        if self.provider not in PROVIDERS:
            raise ValueError(f"provider must be one of {PROVIDERS}, got {self.provider!r}")
        if not self.voice_id:
            raise ValueError("voice_id must be nonempty")
        if self.gender not in VOICE_GENDERS:
            raise ValueError(f"voice gender must be one of {VOICE_GENDERS}, got {self.gender!r}")


@dataclass(frozen=True)
class SynthesisJob:
    """An ordered batch of texts to speak with a rotation of pivot voices.

    Each text item is (utterance id, text, transliterated flag); the flag
    records whether the text was rewritten into the pivot orthography and is
    carried into provenance untouched.
    """

    texts: tuple[tuple[str, str, bool], ...]
    voices: tuple[Voice, ...]
    pivot_language: str
    target_language: str
    audio_format: str = AUDIO_FORMAT

    def __post_init__(self):
        if not self.texts:
            raise ValueError("job needs at least one text")
        if not self.voices:
            raise ValueError("job needs at least one voice")
        for v in self.voices:
            if v.language != self.pivot_language:
                raise ValueError(
                    f"voice {v.voice_id!r} speaks {v.language!r}, job pivot is {self.pivot_language!r}"
                )


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of a corpus synthesis: manifest plus per-text failures."""

    manifest: Manifest
    failures: tuple[tuple[str, str], ...]
    cache_hits: int


def _check_text(text: str, limit: int = MAX_TEXT_CHARS) -> None:
    if not text:
        raise SynthesisError("cannot synthesize empty text")
    if len(text) > limit:
        raise TextTooLongError(f"text has {len(text)} characters, provider limit is {limit}")


def wav_bytes(samples: np.ndarray) -> bytes:
    """Wrap int16 samples in a canonical-format WAV container."""
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wf:
        wf.setnchannels(CHANNELS)
        wf.setsampwidth(SAMPLE_WIDTH)
        wf.setframerate(SAMPLE_RATE)
        wf.writeframes(samples.astype("<i2").tobytes())
    return buf.getvalue()


def wav_duration(data: bytes) -> float:
    """Duration in seconds of a WAV byte string."""
    with wave.open(io.BytesIO(data), "rb") as wf:
        return wf.getnframes() / wf.getframerate()


class MockSynthesizer:
    """Deterministic offline provider: one tone segment per character.

    The tone frequency is a stable digest of (voice_id, character), so equal
    inputs give byte-identical audio across runs and machines, and duration
    is exactly proportional to text length.
    """

    provider = "mock"

    def __init__(self):
        self._freqs: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    def _freq(self, voice_id: str, ch: str) -> float:
        key = (voice_id, ch)
        with self._lock:
            f = self._freqs.get(key)
            if f is None:
                digest = hashlib.sha256(f"{voice_id}|{ch}".encode("utf-8")).digest()
                f = 180.0 + 5.0 * (int.from_bytes(digest[:4], "big") % 128)
                self._freqs[key] = f
        return f

    def synthesize(self, text: str, voice: Voice) -> tuple[bytes, float]:
        _check_text(text)
        t = np.arange(CHAR_SAMPLES) / SAMPLE_RATE
        segments = []
        for ch in text:
            tone = np.sin(2.0 * np.pi * self._freq(voice.voice_id, ch) * t)
            segments.append(np.round(tone * 0.35 * 32767.0).astype(np.int16))
        samples = np.concatenate(segments)
        return wav_bytes(samples), (len(text) * CHAR_SAMPLES) / SAMPLE_RATE


class HttpSynthesizer:
    """JSON-over-HTTPS provider client with exponential-backoff retries.

    Expects `POST {url}` with {text, voice_id, audio_config} and a bearer
    token, answering {"audio_content": base64 WAV}.  HTTP 429 and 5xx plus
    connection errors are retried; other 4xx fail immediately.
    """

    def __init__(
        self,
        provider: str = "cloud_a",
        url: str | None = None,
        api_key: str | None = None,
        session=None,
        max_retries: int = 4,
        backoff_base: float = 0.5,
        timeout: float = 30.0,
        sleep=time.sleep,
    ):
        if provider not in PROVIDERS or provider == "mock":
            raise ValueError(f"HttpSynthesizer provider must be a cloud provider, got {provider!r}")
        self.provider = provider
        self.url = url if url is not None else os.environ.get(ENV_URL)
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_KEY)
        self.session = session
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._sleep = sleep

    def _get_session(self):
        if self.session is None:
            import requests

            self.session = requests.Session()
        return self.session

    def synthesize(self, text: str, voice: Voice) -> tuple[bytes, float]:
        _check_text(text)
        if not self.url:
            raise ProviderError(f"no endpoint configured; set {ENV_URL}")
        if not self.api_key:
            raise ProviderError(f"no API key configured; set {ENV_KEY}")
        import requests

        payload = {
            "text": text,
            "voice_id": voice.voice_id,
            "audio_config": {
                "audio_encoding": "LINEAR16",
                "sample_rate_hertz": SAMPLE_RATE,
            },
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        session = self._get_session()
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                resp = session.post(self.url, json=payload, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"connection error: {exc}"
                continue
            if resp.status_code == 200:
                try:
                    audio = base64.b64decode(resp.json()["audio_content"])
                except (KeyError, ValueError) as exc:
                    raise ProviderError(f"malformed provider response: {exc}") from None
                return audio, wav_duration(audio)
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            raise ProviderError(f"provider rejected request: HTTP {resp.status_code}")
        raise RetryExhaustedError(f"gave up after {self.max_retries + 1} attempts; last: {last_error}")


def get_synthesizer(provider: str, **kwargs):
    """Construct the synthesizer backend for a provider name."""
    if provider == "mock":
        return MockSynthesizer()
    if provider in PROVIDERS:
        return HttpSynthesizer(provider=provider, **kwargs)
    raise ValueError(f"unknown provider {provider!r}; expected one of {PROVIDERS}")


def synthesize(text: str, voice: Voice, synthesizer=None) -> tuple[bytes, float]:
    """Speak one text with one voice; returns (WAV bytes, duration seconds)."""
    if synthesizer is None:
        synthesizer = get_synthesizer(voice.provider)
    return synthesizer.synthesize(text, voice)


def cache_key(provider: str, voice_id: str, text: str, audio_format: str) -> str:
    """Stable content address for one synthesis request."""
    blob = json.dumps([provider, voice_id, text, audio_format], ensure_ascii=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f"{path.name}.tmp-{os.getpid()}-{threading.get_ident()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def synthesize_corpus(
    job: SynthesisJob,
    cache_dir: str | Path,
    parallelism: int = 4,
    synthesizer=None,
) -> SynthesisResult:
    """Synthesize every job text, rotating voices round-robin by text index.

    Audio lands in `cache_dir` addressed by content key, with a JSON sidecar
    per clip; warm-cache reruns make zero provider calls and rebuild a
    byte-identical manifest.  Per-text failures are collected, not raised.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    cache_dir = Path(cache_dir)
    try:
        cache_dir.mkdir(parents=True, exist_ok=True)
        probe = cache_dir / f".probe-{os.getpid()}-{threading.get_ident()}"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise SynthesisError(f"cache dir {cache_dir} is not writable: {exc}") from None

    backends = {}

    def backend_for(voice: Voice):
        if synthesizer is not None:
            return synthesizer
        if voice.provider not in backends:
            backends[voice.provider] = get_synthesizer(voice.provider)
        return backends[voice.provider]

    def work(item):
        idx, (uid, text, transliterated) = item
        voice = job.voices[idx % len(job.voices)]
        key = cache_key(voice.provider, voice.voice_id, text, job.audio_format)
        wav_path = cache_dir / f"{key}.wav"
        meta_path = cache_dir / f"{key}.json"
        hit = wav_path.exists() and meta_path.exists()
        if hit:
            duration = json.loads(meta_path.read_text(encoding="utf-8"))["duration_s"]
        else:
            audio, duration = backend_for(voice).synthesize(text, voice)
            meta = {
                "audio_format": job.audio_format,
                "duration_s": duration,
                "provider": voice.provider,
                "sample_rate": SAMPLE_RATE,
                "text": text,
                "voice_id": voice.voice_id,
            }
            _atomic_write(wav_path, audio)
            _atomic_write(meta_path, (json.dumps(meta, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8"))
        utt = Utterance(
            id=f"syn-{uid}",
            text=text,
            audio=str(wav_path),
            duration_s=duration,
            speaker=voice.voice_id,
            gender=voice.gender,
            language=job.target_language,
            source="synthetic",
            provenance=Provenance(
                provider=voice.provider,
                voice_id=voice.voice_id,
                pivot_language=job.pivot_language,
                transliterated=transliterated,
            ),
        )
        return idx, uid, utt, hit

    entries = []
    failures = []
    cache_hits = 0
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        outcomes = []
        for idx, item in enumerate(job.texts):
            def run(it=(idx, item)):
                try:
                    return work(it)
                except Exception as exc:  # per-text failures must not abort the job
                    return it[0], it[1][0], None, exc
            outcomes.append(pool.submit(run))
        results = sorted(f.result() for f in outcomes)
    for _, uid, utt, info in results:
        if utt is None:
            failures.append((uid, str(info)))
        else:
            entries.append(utt)
            if info:
                cache_hits += 1
    manifest = Manifest(entries=tuple(entries), split="train", language=job.target_language)
    return SynthesisResult(manifest=manifest, failures=tuple(failures), cache_hits=cache_hits)
