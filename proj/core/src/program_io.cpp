#include "lfit/program_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace lfit
{

namespace
{

void append_domain( std::string& out, const std::vector< value_t >& domain )
{
    out += '{';
    for ( std::size_t i = 0; i < domain.size(); ++i )
    {
        if ( i > 0 )
            out += ',';
        out += std::to_string( domain[ i ] );
    }
    out += '}';
}

void append_atom( std::string& out, const variable_decl& decl, value_t value )
{
    out += decl.name;
    out += '(';
    out += std::to_string( value );
    out += ')';
}

enum class tok
{
    ident,
    integer,
    lparen,
    rparen,
    lbrace,
    rbrace,
    comma,
    dot,
    implies,
    at,
    weight,
    end
};

struct token
{
    tok kind;
    std::string_view text;
    std::size_t line;
    std::size_t column;
    std::int64_t number = 0;
};

class lexer
{
    std::string_view _text;
    std::size_t _pos = 0;
    std::size_t _line = 1;
    std::size_t _column = 1;

    [[nodiscard]] char peek( std::size_t ahead = 0 ) const
    {
        return _pos + ahead < _text.size() ? _text[ _pos + ahead ] : '\0';
    }

    void advance( std::size_t n = 1 )
    {
        for ( std::size_t i = 0; i < n && _pos < _text.size(); ++i, ++_pos )
        {
            if ( _text[ _pos ] == '\n' )
            {
                ++_line;
                _column = 1;
            }
            else
                ++_column;
        }
    }

    void skip_space_and_comments()
    {
        for ( ;; )
        {
            const char c = peek();
            if ( c == ' ' || c == '\t' || c == '\r' || c == '\n' )
                advance();
            else if ( c == '#' )
            {
                while ( peek() != '\n' && peek() != '\0' )
                    advance();
            }
            else
                return;
        }
    }

    std::int64_t read_number( std::size_t line, std::size_t column )
    {
        const std::size_t start = _pos;
        while ( std::isdigit( static_cast< unsigned char >( peek() ) ) )
            advance();
        std::int64_t value = 0;
        auto [ ptr, ec ] = std::from_chars( _text.data() + start, _text.data() + _pos, value );
        if ( ec != std::errc{} || value > INT32_MAX )
            throw parse_error{ "integer out of range", line, column };
        return value;
    }

public:
    explicit lexer( std::string_view text ) : _text{ text } {}

    token next()
    {
        skip_space_and_comments();
        const std::size_t line = _line, column = _column, start = _pos;
        const char c = peek();
        auto single = [ & ]( tok k ) {
            advance();
            return token{ k, _text.substr( start, 1 ), line, column };
        };
        switch ( c )
        {
        case '\0': return token{ tok::end, {}, line, column };
        case '(': return single( tok::lparen );
        case ')': return single( tok::rparen );
        case '{': return single( tok::lbrace );
        case '}': return single( tok::rbrace );
        case ',': return single( tok::comma );
        case '.': return single( tok::dot );
        case '@': return single( tok::at );
        case ':':
            if ( peek( 1 ) != '-' )
                throw parse_error{ "expected ':-'", line, column };
            advance( 2 );
            return token{ tok::implies, _text.substr( start, 2 ), line, column };
        case '%':
        {
            if ( peek( 1 ) != '%' )
                throw parse_error{ "expected '%%' weight annotation", line, column };
            advance( 2 );
            while ( peek() == ' ' || peek() == '\t' )
                advance();
            if ( peek() != 'w' || peek( 1 ) != '=' )
                throw parse_error{ "expected 'w=' after '%%'", _line, _column };
            advance( 2 );
            if ( !std::isdigit( static_cast< unsigned char >( peek() ) ) )
                throw parse_error{ "expected a weight", _line, _column };
            const std::size_t nl = _line, nc = _column;
            const std::size_t digits = _pos;
            while ( std::isdigit( static_cast< unsigned char >( peek() ) ) )
                advance();
            std::uint64_t w = 0;
            auto [ ptr, ec ] = std::from_chars( _text.data() + digits, _text.data() + _pos, w );
            if ( ec != std::errc{} )
                throw parse_error{ "weight out of range", nl, nc };
            token t{ tok::weight, _text.substr( start, _pos - start ), line, column };
            t.number = static_cast< std::int64_t >( w );
            return t;
        }
        default: break;
        }
        if ( std::isdigit( static_cast< unsigned char >( c ) ) )
        {
            token t{ tok::integer, {}, line, column };
            t.number = read_number( line, column );
            t.text = _text.substr( start, _pos - start );
            return t;
        }
        if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
        {
            while ( std::isalnum( static_cast< unsigned char >( peek() ) ) || peek() == '_' )
                advance();
            return token{ tok::ident, _text.substr( start, _pos - start ), line, column };
        }
        throw parse_error{ std::string{ "unexpected character '" } + c + "'", line, column };
    }
};

const char* describe( tok k )
{
    switch ( k )
    {
    case tok::ident: return "identifier";
    case tok::integer: return "integer";
    case tok::lparen: return "'('";
    case tok::rparen: return "')'";
    case tok::lbrace: return "'{'";
    case tok::rbrace: return "'}'";
    case tok::comma: return "','";
    case tok::dot: return "'.'";
    case tok::implies: return "':-'";
    case tok::at: return "'@'";
    case tok::weight: return "weight annotation";
    case tok::end: return "end of input";
    }
    return "token";
}

class program_parser
{
    lexer _lex;
    token _cur;
    const variable_schema* _given;
    std::vector< variable_decl > _features;
    std::vector< variable_decl > _targets;
    bool _saw_header = false;
    token _header{};
    std::optional< variable_schema > _schema;

    void bump() { _cur = _lex.next(); }

    token expect( tok k )
    {
        if ( _cur.kind != k )
            throw parse_error{ std::string{ "expected " } + describe( k ) + ", found " + describe( _cur.kind ),
                               _cur.line, _cur.column };
        token t = _cur;
        bump();
        return t;
    }

    void parse_declaration()
    {
        const token at = expect( tok::at );
        const token kind = expect( tok::ident );
        if ( kind.text != "feature" && kind.text != "target" )
            throw parse_error{ "expected '@feature' or '@target'", kind.line, kind.column };
        if ( kind.text == "feature" && !_targets.empty() )
            throw parse_error{ "feature declarations must precede target declarations", kind.line, kind.column };
        const token name = expect( tok::ident );
        expect( tok::lbrace );
        variable_decl decl{ std::string{ name.text }, {} };
        if ( _cur.kind != tok::rbrace )
        {
            decl.domain.push_back( static_cast< value_t >( expect( tok::integer ).number ) );
            while ( _cur.kind == tok::comma )
            {
                bump();
                decl.domain.push_back( static_cast< value_t >( expect( tok::integer ).number ) );
            }
        }
        expect( tok::rbrace );
        ( kind.text == "feature" ? _features : _targets ).push_back( std::move( decl ) );
        if ( !_saw_header )
            _header = at;
        _saw_header = true;
    }

    const variable_schema& schema_for_rules( const token& where )
    {
        if ( _schema )
            return *_schema;
        std::optional< variable_schema > declared;
        if ( _saw_header )
        {
            try
            {
                declared.emplace( _features, _targets );
            }
            catch ( const schema_error& e )
            {
                throw parse_error{ e.what(), _header.line, _header.column };
            }
        }
        if ( _given )
        {
            if ( declared && !( *declared == *_given ) )
                throw parse_error{ "declared schema differs from the expected schema", _header.line, _header.column };
            _schema = *_given;
        }
        else if ( declared )
            _schema = std::move( declared );
        else
            throw parse_error{ "program text declares no schema", where.line, where.column };
        return *_schema;
    }

    atom parse_atom( role expected )
    {
        const token name = expect( tok::ident );
        expect( tok::lparen );
        const token val = expect( tok::integer );
        expect( tok::rparen );
        const auto& schema = *_schema;
        const auto found = schema.find( name.text );
        if ( !found )
            throw parse_error{ "unknown variable '" + std::string{ name.text } + "'", name.line, name.column };
        if ( found->kind != expected )
            throw parse_error{ "variable '" + std::string{ name.text } +
                                   ( expected == role::target ? "' is not a target" : "' is not a feature" ),
                               name.line, name.column };
        const auto value = static_cast< value_t >( val.number );
        if ( !schema.in_domain( expected, found->var, value ) )
            throw parse_error{ "value " + std::to_string( value ) + " is outside the domain of '" +
                                   std::string{ name.text } + "'",
                               val.line, val.column };
        return atom{ found->var, value };
    }

    rule parse_rule()
    {
        schema_for_rules( _cur );
        const atom head = parse_atom( role::target );
        expect( tok::implies );
        std::vector< atom > body;
        if ( _cur.kind != tok::dot )
        {
            for ( ;; )
            {
                const token at = _cur;
                const atom a = parse_atom( role::feature );
                if ( std::ranges::any_of( body, [ & ]( const atom& b ) { return b.var == a.var; } ) )
                    throw parse_error{ "feature mentioned twice in one body", at.line, at.column };
                body.push_back( a );
                if ( _cur.kind != tok::comma )
                    break;
                bump();
            }
        }
        expect( tok::dot );
        std::uint64_t weight = 0;
        if ( _cur.kind == tok::weight )
        {
            weight = static_cast< std::uint64_t >( _cur.number );
            bump();
        }
        return rule{ head, std::move( body ), weight };
    }

public:
    program_parser( std::string_view text, const variable_schema* given )
        : _lex{ text }, _cur{ tok::end, {}, 1, 1 }, _given{ given }
    {
        bump();
    }

    program parse()
    {
        std::vector< rule > rules;
        std::set< rule > seen;
        while ( _cur.kind == tok::at )
            parse_declaration();
        while ( _cur.kind != tok::end )
        {
            if ( _cur.kind == tok::at )
                throw parse_error{ "schema declarations must precede rules", _cur.line, _cur.column };
            const token start = _cur;
            rule r = parse_rule();
            if ( !seen.insert( r ).second )
                throw parse_error{ "duplicate rule", start.line, start.column };
            rules.push_back( std::move( r ) );
        }
        const token end = _cur;
        return program{ schema_for_rules( end ), std::move( rules ) };
    }
};

// CSV helpers.

std::vector< std::string_view > split_fields( std::string_view line )
{
    std::vector< std::string_view > fields;
    std::size_t start = 0;
    for ( ;; )
    {
        const auto comma = line.find( ',', start );
        fields.push_back( line.substr( start, comma == std::string_view::npos ? std::string_view::npos : comma - start ) );
        if ( comma == std::string_view::npos )
            break;
        start = comma + 1;
    }
    return fields;
}

std::string_view trim( std::string_view s )
{
    while ( !s.empty() && ( s.front() == ' ' || s.front() == '\t' ) )
        s.remove_prefix( 1 );
    while ( !s.empty() && ( s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ) )
        s.remove_suffix( 1 );
    return s;
}

} // namespace

std::string serialize_schema( const variable_schema& schema )
{
    std::string out;
    for ( const auto& decl : schema.features() )
    {
        out += "@feature " + decl.name + ' ';
        append_domain( out, decl.domain );
        out += '\n';
    }
    for ( const auto& decl : schema.targets() )
    {
        out += "@target " + decl.name + ' ';
        append_domain( out, decl.domain );
        out += '\n';
    }
    return out;
}

std::string serialize_rule( const variable_schema& schema, const rule& r )
{
    std::string out;
    append_atom( out, schema.target( r.head().var ), r.head().value );
    out += " :- ";
    const auto body = r.body();
    for ( std::size_t i = 0; i < body.size(); ++i )
    {
        if ( i > 0 )
            out += ", ";
        append_atom( out, schema.feature( body[ i ].var ), body[ i ].value );
    }
    out += ".  %% w=";
    out += std::to_string( r.weight() );
    return out;
}

std::string serialize_program( const program& p )
{
    std::string out = serialize_schema( p.schema() );
    out += '\n';
    for ( const auto& r : p.rules() )
    {
        out += serialize_rule( p.schema(), r );
        out += '\n';
    }
    return out;
}

program parse_program( std::string_view text )
{
    return program_parser{ text, nullptr }.parse();
}

program parse_program( std::string_view text, const variable_schema& schema )
{
    return program_parser{ text, &schema }.parse();
}

std::string write_transitions_csv( const variable_schema& schema, std::span< const transition > rows,
                                   bool schema_comments )
{
    std::string out;
    if ( schema_comments )
    {
        const std::string decls = serialize_schema( schema );
        std::size_t start = 0;
        while ( start < decls.size() )
        {
            const auto nl = decls.find( '\n', start );
            out += "# ";
            out.append( decls, start, nl - start + 1 );
            start = nl + 1;
        }
    }
    bool first = true;
    for ( auto r : { role::feature, role::target } )
        for ( const auto& decl : schema.variables( r ) )
        {
            if ( !first )
                out += ',';
            out += decl.name;
            first = false;
        }
    out += '\n';
    for ( const auto& t : rows )
    {
        first = true;
        for ( const auto* s : { &t.features, &t.targets } )
            for ( value_t v : *s )
            {
                if ( !first )
                    out += ',';
                out += std::to_string( v );
                first = false;
            }
        out += '\n';
    }
    return out;
}

transition_table read_transitions_csv( std::string_view text, const csv_schema_options& options )
{
    std::string schema_text;
    std::vector< std::string > header;
    std::vector< std::vector< value_t > > cells;
    std::vector< std::size_t > cell_lines;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while ( start < text.size() )
    {
        auto nl = text.find( '\n', start );
        if ( nl == std::string_view::npos )
            nl = text.size();
        const std::string_view line = trim( text.substr( start, nl - start ) );
        start = nl + 1;
        ++line_no;
        if ( line.empty() )
            continue;
        if ( line.front() == '#' )
        {
            const std::string_view body = trim( line.substr( 1 ) );
            if ( header.empty() && !body.empty() && body.front() == '@' )
            {
                schema_text += body;
                schema_text += '\n';
            }
            continue;
        }
        const auto fields = split_fields( line );
        if ( header.empty() )
        {
            for ( auto f : fields )
            {
                f = trim( f );
                if ( f.empty() )
                    throw parse_error{ "empty column name", line_no, 1 };
                header.emplace_back( f );
            }
            continue;
        }
        if ( fields.size() != header.size() )
            throw parse_error{ "expected " + std::to_string( header.size() ) + " fields, found " +
                                   std::to_string( fields.size() ),
                               line_no, 1 };
        std::vector< value_t > row;
        row.reserve( fields.size() );
        std::size_t column = 1;
        for ( auto f : fields )
        {
            const auto cell = trim( f );
            value_t v = 0;
            auto [ ptr, ec ] = std::from_chars( cell.data(), cell.data() + cell.size(), v );
            if ( ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty() )
                throw parse_error{ "expected an integer, found '" + std::string{ cell } + "'", line_no, column };
            row.push_back( v );
            column += f.size() + 1;
        }
        cells.push_back( std::move( row ) );
        cell_lines.push_back( line_no );
    }
    if ( header.empty() )
        throw parse_error{ "missing header row", line_no + 1, 1 };

    std::optional< variable_schema > schema;
    if ( !schema_text.empty() )
        schema = parse_program( schema_text ).schema();
    else if ( options.schema )
        schema = options.schema;
    else
    {
        if ( options.inferred_targets == 0 || options.inferred_targets >= header.size() )
            throw parse_error{ "cannot infer a schema: need at least one feature and one target column", 1, 1 };
        const std::size_t n_features = header.size() - options.inferred_targets;
        std::vector< std::set< value_t > > observed( header.size() );
        for ( const auto& row : cells )
            for ( std::size_t c = 0; c < row.size(); ++c )
                observed[ c ].insert( row[ c ] );
        std::vector< variable_decl > features, targets;
        for ( std::size_t c = 0; c < header.size(); ++c )
        {
            variable_decl decl{ header[ c ], { observed[ c ].begin(), observed[ c ].end() } };
            if ( decl.domain.empty() )
                decl.domain.push_back( 0 );
            ( c < n_features ? features : targets ).push_back( std::move( decl ) );
        }
        try
        {
            schema.emplace( std::move( features ), std::move( targets ) );
        }
        catch ( const schema_error& e )
        {
            throw parse_error{ e.what(), 1, 1 };
        }
    }

    const std::size_t n_features = schema->features().size();
    const std::size_t n_columns = n_features + schema->targets().size();
    bool header_ok = header.size() == n_columns;
    for ( std::size_t c = 0; header_ok && c < n_columns; ++c )
    {
        const auto& expected = c < n_features ? schema->feature( static_cast< var_t >( c ) ).name
                                              : schema->target( static_cast< var_t >( c - n_features ) ).name;
        header_ok = header[ c ] == expected;
    }
    if ( !header_ok )
        throw parse_error{ "header row does not list the schema variables in order", 1, 1 };

    transition_table table{ *schema, {} };
    table.rows.reserve( cells.size() );
    for ( std::size_t i = 0; i < cells.size(); ++i )
    {
        auto& row = cells[ i ];
        transition t{ state( row.begin(), row.begin() + static_cast< std::ptrdiff_t >( n_features ) ),
                      state( row.begin() + static_cast< std::ptrdiff_t >( n_features ), row.end() ) };
        try
        {
            validate( table.schema, t );
        }
        catch ( const schema_error& e )
        {
            throw parse_error{ e.what(), cell_lines[ i ], 1 };
        }
        table.rows.push_back( std::move( t ) );
    }
    return table;
}

} // namespace lfit
