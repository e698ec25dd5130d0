import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go


def plot_hull(hull, **kwargs):
    """
    Plot the offsets of a hull.

    Keyword Arguments:
        plot_type: 'contour' (default) for the offset map over (x, z), '3D' for the surface of both sides,
                   'sections' for offset curves at a few stations
        mirror: show the full hull instead of the x <= 0 half. default = True
        stations: number of sections for plot_type='sections'. default = 5
        style: {'darkMode': bool, # activate dark mode. default = False
                'color': str, # plotly colorscale. default = 'Blues'
                }

    Returns:
        plotly.graph_objects.Figure
    """
    data = {'plot_type': 'contour', 'mirror': True, 'stations': 5, 'style': None}
    for key, value in kwargs.items():
        data[key] = value

    if data['plot_type'] not in ['contour', '3D', 'sections']:
        raise ValueError('The plot type "{}" is not recognised'.format(data['plot_type']))

    grid = hull.grid
    field = hull.field()
    x = grid.x_lines
    if not data['mirror']:
        keep = x <= 0
        x, field = x[keep], field[:, keep]
    z = grid.z_lines
    style = define_style(data['style'])

    if data['plot_type'] == 'contour':
        fig = go.Figure(data=go.Contour(x=x, y=z, z=field, colorscale=style['color'],
                                        colorbar=dict(title='f, m'),
                                        hovertemplate='<b>x</b>: %{x:.3f}<br><b>z</b>: %{y:.3f}<br>'
                                                      '<b>f</b>: %{z:.4f}<extra></extra>'))
        fig.update_layout(xaxis_title='x, m', yaxis_title='z, m')
        fig.update_yaxes(autorange='reversed', scaleanchor='x')
        title = 'Hull Offsets'

    elif data['plot_type'] == '3D':
        fig = go.Figure()
        for side in [1, -1]:
            fig.add_trace(go.Surface(x=x, y=-z, z=side * field, colorscale=style['color'], showscale=False))
        fig.update_layout(scene=dict(xaxis_title='x, m', yaxis_title='-z, m', zaxis_title='y, m',
                                     aspectmode='data'))
        title = 'Hull Surface - 3D View'

    else:
        fig = go.Figure()
        columns = np.unique(np.linspace(0, len(x) - 1, data['stations']).round().astype(int))
        for idx in columns:
            fig.add_trace(go.Scatter(x=field[:, idx], y=z, mode='lines', name='x = {:.3f}'.format(x[idx])))
        fig.update_layout(xaxis_title='f, m', yaxis_title='z, m', hovermode='closest')
        fig.update_yaxes(autorange='reversed')
        title = 'Hull Sections'

    fig.layout.template = style['darkMode']
    fig.update_layout(title=title)
    return fig


def plot_spectrum(report, **kwargs):
    """|eigenvalues| of M_w on a log scale, with the census thresholds as horizontal lines"""
    data = {'style': None}
    for key, value in kwargs.items():
        data[key] = value

    df = report.to_frame()
    fig = px.scatter(df, x='index', y='abs_eigenvalue', log_y=True)
    for threshold in report.counts:
        fig.add_hline(y=threshold * report.eigenvalues[0], line_dash='dash',
                      annotation_text='{:g} max'.format(threshold))
    style = define_style(data['style'])
    fig.layout.template = style['darkMode']
    fig.update_layout(xaxis_title='index', yaxis_title='|eigenvalue|', title='Spectrum of the Wave Matrix')
    return fig


def plot_sweep(records, **kwargs):
    data = {'y_axis': 'objective', 'style': None}
    for key, value in kwargs.items():
        data[key] = value

    possible_props = ['objective', 'wave', 'viscous', 'xbar', 'zbar', 'drag_distance']
    if data['y_axis'] not in possible_props:
        raise ValueError('The axis "{}" is not recognised'.format(data['y_axis']))

    df = pd.DataFrame([r.to_dict() for r in records])
    fig = go.Figure(go.Scatter(x=df['fr'], y=df[data['y_axis']], mode='lines+markers',
                               hovertemplate='<b>Fr</b>: %{x}<br><b>y</b>: %{y:.4g}<extra></extra>'))
    units = {'objective': 'N', 'wave': 'N', 'viscous': 'N', 'xbar': 'm', 'zbar': 'm', 'drag_distance': '-'}
    style = define_style(data['style'])
    fig.layout.template = style['darkMode']
    fig.update_layout(xaxis_title='Fr', yaxis_title=data['y_axis'] + ', ' + units[data['y_axis']],
                      title='Froude Sweep - ' + data['y_axis'], hovermode='closest')
    return fig


def plot_boundary_layer(result, **kwargs):
    data = {'style': None}
    for key, value in kwargs.items():
        data[key] = value

    df = result.to_frame()
    fig = go.Figure(go.Scatter(x=df['eps'], y=df['width'], mode='markers', name='solves'))
    if np.isfinite(result.exponent):
        eps = np.array([df['eps'].min(), df['eps'].max()])
        fig.add_trace(go.Scatter(x=eps, y=np.exp(result.intercept) * eps ** result.exponent, mode='lines',
                                 name='slope {:.3f}'.format(result.exponent)))
    style = define_style(data['style'])
    fig.layout.template = style['darkMode']
    fig.update_xaxes(type='log')
    fig.update_yaxes(type='log')
    fig.update_layout(xaxis_title='eps, Pa', yaxis_title='width, m', title='Boundary Layer Width')
    return fig


def define_style(style):
    set_style = {'darkMode': False, 'color': 'Blues'}
    if style is not None:
        for key in style.keys():
            set_style[key] = style[key]

    if set_style['darkMode']:
        set_style['darkMode'] = 'plotly_dark'
    else:
        set_style['darkMode'] = None

    return set_style
