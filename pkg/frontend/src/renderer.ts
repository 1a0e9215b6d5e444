// WebGL sphere-interior renderer for equirectangular frames. The fragment
// shader mirrors sampler.ts; GL_REPEAT on the horizontal axis makes the wrap
// seam filter across the frame edges.

const VERT = `
attribute vec2 pos;
varying vec2 ndc;
void main() {
  ndc = pos;
  gl_Position = vec4(pos, 0.0, 1.0);
}
`;

const FRAG = `
precision highp float;
varying vec2 ndc;
uniform sampler2D pano;
uniform float yaw;      // radians
uniform float pitch;    // radians
uniform float tanHalf;  // tan(fovY / 2)
uniform float aspect;
const float PI = 3.141592653589793;
void main() {
  vec3 d = vec3(ndc.x * tanHalf * aspect, ndc.y * tanHalf, 1.0);
  float cp = cos(pitch); float sp = sin(pitch);
  d = vec3(d.x, d.y * cp + d.z * sp, -d.y * sp + d.z * cp);
  float cy = cos(yaw); float sy = sin(yaw);
  d = vec3(d.x * cy + d.z * sy, d.y, -d.x * sy + d.z * cy);
  float lon = atan(d.x, d.z);
  float lat = atan(d.y, length(d.xz));
  vec2 uv = vec2(lon / (2.0 * PI) + 0.5, 0.5 - lat / PI);
  gl_FragColor = texture2D(pano, uv);
}
`;

export class SphereRenderer {
  private gl: WebGLRenderingContext;
  private program: WebGLProgram;
  private texture: WebGLTexture;
  private uniforms: Record<string, WebGLUniformLocation>;
  fovYDegrees = 75;

  constructor(private canvas: HTMLCanvasElement) {
    const gl = canvas.getContext("webgl");
    if (!gl) throw new Error("WebGL unavailable");
    this.gl = gl;
    this.program = this.link(VERT, FRAG);
    gl.useProgram(this.program);

    const quad = gl.createBuffer()!;
    gl.bindBuffer(gl.ARRAY_BUFFER, quad);
    gl.bufferData(
      gl.ARRAY_BUFFER,
      new Float32Array([-1, -1, 1, -1, -1, 1, 1, 1]),
      gl.STATIC_DRAW,
    );
    const pos = gl.getAttribLocation(this.program, "pos");
    gl.enableVertexAttribArray(pos);
    gl.vertexAttribPointer(pos, 2, gl.FLOAT, false, 0, 0);

    this.texture = gl.createTexture()!;
    gl.bindTexture(gl.TEXTURE_2D, this.texture);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_S, gl.REPEAT);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_T, gl.CLAMP_TO_EDGE);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MIN_FILTER, gl.LINEAR);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MAG_FILTER, gl.LINEAR);

    this.uniforms = {};
    for (const name of ["yaw", "pitch", "tanHalf", "aspect"]) {
      this.uniforms[name] = gl.getUniformLocation(this.program, name)!;
    }
  }

  private link(vertSrc: string, fragSrc: string): WebGLProgram {
    const gl = this.gl;
    const compile = (type: number, src: string) => {
      const shader = gl.createShader(type)!;
      gl.shaderSource(shader, src);
      gl.compileShader(shader);
      if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
        throw new Error(gl.getShaderInfoLog(shader) ?? "shader compile failed");
      }
      return shader;
    };
    const program = gl.createProgram()!;
    gl.attachShader(program, compile(gl.VERTEX_SHADER, vertSrc));
    gl.attachShader(program, compile(gl.FRAGMENT_SHADER, fragSrc));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(gl.getProgramInfoLog(program) ?? "program link failed");
    }
    return program;
  }

  /** Upload the current frame (decoded PNG in an image or canvas source). */
  setFrame(source: TexImageSource): void {
    const gl = this.gl;
    gl.bindTexture(gl.TEXTURE_2D, this.texture);
    gl.texImage2D(gl.TEXTURE_2D, 0, gl.RGB, gl.RGB, gl.UNSIGNED_BYTE, source);
    // non-power-of-two frames forbid REPEAT in WebGL1; pad should not occur
    // with the service's even widths, but fall back gracefully
    if (gl.getError() !== gl.NO_ERROR) {
      gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_S, gl.CLAMP_TO_EDGE);
    }
  }

  draw(gazeYawDegrees: number, gazePitchDegrees: number): void {
    const gl = this.gl;
    const dpr = window.devicePixelRatio || 1;
    const w = Math.round(this.canvas.clientWidth * dpr);
    const h = Math.round(this.canvas.clientHeight * dpr);
    if (this.canvas.width !== w || this.canvas.height !== h) {
      this.canvas.width = w;
      this.canvas.height = h;
    }
    gl.viewport(0, 0, w, h);
    gl.useProgram(this.program);
    gl.uniform1f(this.uniforms.yaw, (gazeYawDegrees * Math.PI) / 180);
    gl.uniform1f(this.uniforms.pitch, (gazePitchDegrees * Math.PI) / 180);
    gl.uniform1f(this.uniforms.tanHalf, Math.tan(((this.fovYDegrees / 2) * Math.PI) / 180));
    gl.uniform1f(this.uniforms.aspect, w / Math.max(1, h));
    gl.drawArrays(gl.TRIANGLE_STRIP, 0, 4);
  }
}
